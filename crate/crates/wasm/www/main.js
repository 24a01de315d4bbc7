import init, { dispersionCurve, rieszWeights, PulseSim } from "./pkg/cfgl_wasm.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

function plot(canvas, series, xs) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  const finite = series.flatMap((s) => s.ys.filter(Number.isFinite));
  if (finite.length === 0) return;
  let lo = Math.min(...finite);
  let hi = Math.max(...finite);
  if (hi === lo) hi = lo + 1;
  const x0 = xs[0];
  const x1 = xs[xs.length - 1];
  const px = (x) => pad + ((x - x0) / (x1 - x0)) * (w - 2 * pad);
  const py = (y) => h - pad - ((y - lo) / (hi - lo)) * (h - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.font = "12px monospace";
  ctx.fillText(hi.toPrecision(4), 2, pad);
  ctx.fillText(lo.toPrecision(4), 2, h - pad);
  ctx.fillText(x0.toPrecision(3), pad, h - pad + 15);
  ctx.fillText(x1.toPrecision(3), w - pad - 30, h - pad + 15);

  series.forEach((s, i) => {
    ctx.strokeStyle = COLORS[i % COLORS.length];
    ctx.beginPath();
    let pen = false;
    s.ys.forEach((y, j) => {
      if (!Number.isFinite(y)) {
        pen = false;
        return;
      }
      if (pen) ctx.lineTo(px(xs[j]), py(y));
      else ctx.moveTo(px(xs[j]), py(y));
      pen = true;
    });
    ctx.stroke();
    if (s.label) {
      ctx.fillStyle = ctx.strokeStyle;
      ctx.fillText(s.label, w - pad - 120, pad + 15 * (i + 1));
    }
  });
}

function showError(e) {
  alert(e instanceof Error ? e.message : String(e));
}

function drawDispersion() {
  try {
    const alphas = document.getElementById("disp-alphas").value
      .split(",").map((s) => parseFloat(s.trim())).filter(Number.isFinite);
    const kMax = parseFloat(document.getElementById("disp-kmax").value);
    const n = 301;
    const ks = Array.from({ length: n }, (_, i) => (kMax * i) / (n - 1));
    const series = alphas.map((a) => ({
      label: `alpha = ${a}`,
      ys: Array.from(dispersionCurve(a, kMax, n)),
    }));
    plot(document.getElementById("disp-canvas"), series, ks);
  } catch (e) {
    showError(e);
  }
}

function tabulateWeights() {
  try {
    const alpha = parseFloat(document.getElementById("w-alpha").value);
    const k = parseInt(document.getElementById("w-k").value, 10);
    const w = rieszWeights(alpha, k);
    const rows = [];
    for (let j = 0; j <= k; j++) {
      rows.push(`<tr><td>${j}</td><td>${w[k + j].toExponential(10)}</td></tr>`);
    }
    const sum = w.reduce((a, b) => a + b, 0);
    document.getElementById("w-table").innerHTML =
      `<table><tr><th>k</th><th>w_k = w_-k</th></tr>${rows.join("")}` +
      `<tr><td>sum</td><td>${sum.toExponential(4)}</td></tr></table>`;
  } catch (e) {
    showError(e);
  }
}

let sim = null;
let running = false;

function frame() {
  if (!running || sim === null) return;
  try {
    const t = sim.advance(5);
    const xs = Array.from(sim.nodes());
    plot(document.getElementById("p-canvas"), [{ label: "|B|^2", ys: Array.from(sim.profile()) }], xs);
    document.getElementById("p-stats").textContent =
      `t = ${t.toFixed(3)}   max|B|^2 = ${sim.maxModulusSq().toExponential(5)}   ` +
      `localization = ${sim.localization().toFixed(4)}`;
  } catch (e) {
    running = false;
    showError(e);
    return;
  }
  requestAnimationFrame(frame);
}

function startPulse() {
  try {
    if (sim !== null) sim.free();
    sim = new PulseSim(
      parseFloat(document.getElementById("p-alpha").value),
      parseInt(document.getElementById("p-m").value, 10),
      parseFloat(document.getElementById("p-tau").value),
      0.5,
      document.getElementById("p-real").checked,
    );
  } catch (e) {
    sim = null;
    showError(e);
    return;
  }
  running = true;
  requestAnimationFrame(frame);
}

await init();
document.getElementById("disp-go").onclick = drawDispersion;
document.getElementById("w-go").onclick = tabulateWeights;
document.getElementById("p-start").onclick = startPulse;
document.getElementById("p-stop").onclick = () => { running = false; };
drawDispersion();
tabulateWeights();
