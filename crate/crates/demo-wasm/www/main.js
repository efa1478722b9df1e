import init, { errorCurves, landscapeView, depthTable } from "../pkg/thrift_demo.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"];
const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function guard(errorId, fn) {
  $(errorId).textContent = "";
  try {
    fn();
  } catch (e) {
    $(errorId).textContent = String(e.message ?? e);
  }
}

function legend(id, names) {
  $(id).innerHTML = names.map((n, i) => `<span style="color:${COLORS[i % COLORS.length]}">&#9632; ${n}</span>`).join("");
}

function drawCurves() {
  const set = JSON.parse(errorCurves(num("c-chain"), num("c-alpha"), num("c-time"), $("c-formulas").value, num("c-nmax")));
  const canvas = $("c-canvas");
  const ctx = canvas.getContext("2d");
  const pad = 50;
  const w = canvas.width - 2 * pad;
  const h = canvas.height - 2 * pad;
  ctx.clearRect(0, 0, canvas.width, canvas.height);

  const floor = 1e-16;
  const ys = set.curves.flatMap((c) => c.error.map((e) => Math.log10(Math.max(e, floor))));
  const xs = set.curves[0].steps.map((n) => Math.log10(n));
  const [x0, x1] = [Math.min(...xs), Math.max(...xs, Math.min(...xs) + 1)];
  const [y0, y1] = [Math.floor(Math.min(...ys)), Math.ceil(Math.max(...ys, Math.min(...ys) + 1))];
  const px = (x) => pad + ((x - x0) / (x1 - x0)) * w;
  const py = (y) => pad + h - ((y - y0) / (y1 - y0)) * h;

  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#333";
  ctx.strokeRect(pad, pad, w, h);
  for (let y = y0; y <= y1; y++) {
    ctx.fillText(`1e${y}`, 8, py(y) + 4);
  }
  set.curves[0].steps.forEach((n) => ctx.fillText(String(n), px(Math.log10(n)) - 6, pad + h + 16));
  ctx.fillText("steps N", pad + w / 2, pad + h + 34);
  ctx.fillText(`L=${set.chain}  alpha=${set.alpha}  T=${set.time}  worst-case error`, pad, pad - 12);

  set.curves.forEach((c, i) => {
    ctx.strokeStyle = COLORS[i % COLORS.length];
    ctx.beginPath();
    c.steps.forEach((n, k) => {
      const [x, y] = [px(Math.log10(n)), py(Math.log10(Math.max(c.error[k], floor)))];
      k === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
    });
    ctx.stroke();
  });
  legend("c-legend", set.curves.map((c) => c.formula));
}

function drawLandscape() {
  const view = JSON.parse(landscapeView(num("l-chain"), num("l-budget"), $("l-formulas").value, num("l-res")));
  const canvas = $("l-canvas");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const names = [...new Set(view.cells.map((c) => c.best).filter((b) => b))].sort();
  const [na, nt] = [view.alphas.length, view.times.length];
  const cw = canvas.width / na;
  const ch = canvas.height / nt;
  view.cells.forEach((c) => {
    const i = view.alphas.indexOf(c.alpha);
    const j = view.times.indexOf(c.time);
    ctx.fillStyle = c.best ? COLORS[names.indexOf(c.best) % COLORS.length] : "#eee";
    ctx.fillRect(i * cw, canvas.height - (j + 1) * ch, cw, ch);
  });
  legend("l-legend", names);
  if (view.warnings.length) {
    $("l-error").textContent = view.warnings.join("\n");
  }
}

function showTable() {
  const rows = JSON.parse(depthTable($("t-model").value, num("t-budget")));
  const body = rows
    .map((r) => `<tr><td style="text-align:left">${r.formula}</td><td>${r.two_qubit}</td><td>${r.cnot}</td><td>${r.steps || "exceeds budget"}</td></tr>`)
    .join("");
  $("t-out").innerHTML = `<table><tr><th>formula</th><th>2-qubit depth</th><th>CNOT depth</th><th>steps</th></tr>${body}</table>`;
}

await init();
$("status").textContent = "";
$("c-run").onclick = () => guard("c-error", drawCurves);
$("l-run").onclick = () => guard("l-error", drawLandscape);
$("t-run").onclick = () => guard("t-error", showTable);
guard("t-error", showTable);
