//! Invariant decomposition of the space of tensors
//! `F(x, y, z) = g((nabla_x phi) y, z)` on an almost contact metric vector
//! space of dimension `2n + 1`, and classification into the twelve basic
//! classes.
//!
//! Component `i` of [`decomposition::components`] is the image of the
//! projection `p_i`, and a tensor lying in exactly that component belongs
//! to class `W_i` in [`classifier`]. Components 9 and 10 exist only for
//! `n >= 2`.
//!
//! | component | projection |
//! |---|---|
//! | 1 | `F3` |
//! | 2 | `F7` |
//! | 3 | `F8` |
//! | 4 | `(F2 + F4 + F5 + F6 - 4 F7 - F3) / 4` |
//! | 5 | `(F2 + F4 - F5 - F6 - 4 F8 - F3) / 4` |
//! | 6 | `(F2 - F4 + F5 - F6 - F3) / 4` |
//! | 7 | `(F2 - F4 - F5 + F6 - F3) / 4` |
//! | 8 | `F1 - F3` |
//! | 9 | `F9` |
//! | 10 | `F10 - F9` |
//! | 11 | `F11` |
//! | 12 | `F12 - F11` |
//!
//! `Fi` is [`forms::associated_form`] with index `i`.

pub mod classifier;
pub mod decomposition;
pub mod equivariance;
pub mod error;
pub mod forms;
pub mod geometry;
pub mod io;
pub mod selftest;
pub mod structure;
pub mod tensor;

pub use error::{Error, Result};
