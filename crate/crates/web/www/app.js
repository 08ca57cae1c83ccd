import init, { charts, classify_chart, blend } from "./pkg/acm_web.js";

const $ = (id) => document.getElementById(id);

function renderResult(target, result) {
  target.replaceChildren();
  if (!result.ok) {
    const p = document.createElement("p");
    p.className = "error";
    p.textContent = result.error;
    target.append(p);
    return;
  }
  const { spectrum, verdict } = result;
  const verdictLine = document.createElement("p");
  verdictLine.className = "verdict";
  const classes = verdict.classes.map((i) => "W" + i).join(" ⊕ ");
  verdictLine.textContent = verdict.kind + (classes ? ": " + classes : "");
  target.append(verdictLine);

  const max = Math.max(1e-300, ...spectrum.norms.filter((v) => v !== null));
  const table = document.createElement("table");
  table.innerHTML = "<tr><th>component</th><th>norm</th><th></th></tr>";
  spectrum.norms.forEach((v, i) => {
    const row = table.insertRow();
    row.insertCell().textContent = i + 1;
    row.insertCell().textContent = v === null ? "absent" : v.toExponential(3);
    const bar = document.createElement("div");
    bar.className = "bar";
    bar.style.width = v === null ? "0" : (12 * v) / max + "rem";
    row.insertCell().append(bar);
  });
  target.append(table);

  for (const note of verdict.diagnostics.notes) {
    const p = document.createElement("p");
    p.textContent = note;
    target.append(p);
  }
  const raw = document.createElement("pre");
  raw.textContent = JSON.stringify(verdict, null, 2);
  target.append(raw);
}

function buildWeights() {
  const box = $("weights");
  for (let i = 1; i <= 12; i++) {
    const label = document.createElement("label");
    label.textContent = "W" + i + " ";
    const input = document.createElement("input");
    input.type = "number";
    input.step = "any";
    input.value = i === 2 || i === 5 ? "1" : "0";
    input.id = "w" + i;
    label.append(input);
    box.append(label);
  }
}

async function main() {
  await init();
  const list = JSON.parse(charts());
  for (const c of list.charts) {
    const option = document.createElement("option");
    option.value = c.name;
    option.textContent = `${c.name} (dim ${c.dim})`;
    $("chart").append(option);
  }
  buildWeights();

  $("classify").addEventListener("click", () => {
    const out = classify_chart($("chart").value, $("point").value, Number($("step").value), Number($("tol").value));
    renderResult($("chart-out"), JSON.parse(out));
  });
  $("blend").addEventListener("click", () => {
    const weights = Float64Array.from({ length: 12 }, (_, i) => Number($("w" + (i + 1)).value));
    const out = blend(Number($("n").value), Number($("seed").value), weights);
    renderResult($("blend-out"), JSON.parse(out));
  });
}

main();
