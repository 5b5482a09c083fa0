// Expects the wasm-bindgen output (target "web") in ./pkg.
import init, { spectral_density, sz_curves, ground_state_entropy } from "./pkg/mfspin_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const status = (msg) => { $("status").textContent = msg; };

function bath() {
  return [$("topology").value, num("omega0"), num("gamma"), num("alpha")];
}

// series: [{ xs, ys, color }]; NaN points break the line.
function plot(canvas, series, xLabel, yLabel) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  const xs = series.flatMap((s) => s.xs);
  const ys = series.flatMap((s) => s.ys).filter(Number.isFinite);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(0, ...ys), Math.max(...ys)];
  if (y1 === y0) y1 = y0 + 1;
  const px = (x) => pad + ((x - x0) / (x1 - x0)) * (w - 2 * pad);
  const py = (y) => h - pad - ((y - y0) / (y1 - y0)) * (h - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.font = "12px sans-serif";
  ctx.fillText(xLabel, w / 2, h - 8);
  ctx.fillText(yLabel, 4, pad - 10);
  for (const [v, x, y] of [[x0, px(x0), h - pad + 14], [x1, px(x1) - 20, h - pad + 14]]) {
    ctx.fillText(v.toPrecision(3), x, y);
  }
  for (const [v, y] of [[y0, py(y0)], [y1, py(y1) + 10]]) ctx.fillText(v.toPrecision(3), 2, y);

  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    let pen = false;
    s.xs.forEach((x, i) => {
      const y = s.ys[i];
      if (!Number.isFinite(y)) { pen = false; return; }
      pen ? ctx.lineTo(px(x), py(y)) : ctx.moveTo(px(x), py(y));
      pen = true;
    });
    ctx.stroke();
  }
}

function guarded(fn) {
  return () => {
    status("");
    try { fn(); } catch (e) { status(String(e)); }
  };
}

function plotJ() {
  const [, omega0, gamma, alpha] = bath();
  const flat = spectral_density(omega0, gamma, alpha, 4 * omega0, 400);
  const xs = [], ys = [];
  for (let i = 0; i < flat.length; i += 2) { xs.push(flat[i]); ys.push(flat[i + 1]); }
  plot($("j-canvas"), [{ xs, ys, color: "#2980b9" }], "ω", "J(ω)");
}

function plotSz() {
  const started = performance.now();
  const flat = sz_curves(...bath(), num("tmax"), num("points"), num("nmax"));
  const cols = 5;
  const column = (k) => Array.from({ length: flat.length / cols }, (_, i) => flat[i * cols + k]);
  const t = column(0);
  const colors = ["#c0392b", "#2c3e50", "#27ae60", "#8e44ad"];
  plot($("sz-canvas"), colors.map((color, k) => ({ xs: t, ys: column(k + 1), color })), "t", "s_z");
  status(`curves computed in ${(performance.now() - started).toFixed(0)} ms`);
}

function entropy() {
  const [s, n] = ground_state_entropy(...bath());
  $("entropy-out").textContent = `S/ln 2 = ${s.toFixed(4)} (Fock cutoff n = ${n})`;
}

await init();
$("plot-j").onclick = guarded(plotJ);
$("plot-sz").onclick = guarded(plotSz);
$("entropy").onclick = guarded(entropy);
guarded(plotJ)();
