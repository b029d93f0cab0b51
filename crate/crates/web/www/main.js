import init, { coherenceCurve, lambdaGrid, strategyCurves } from "./pkg/thermoq_web.js";

const POINTS = 200;
const COLORS = ["#1f77b4", "#d62728", "#2ca02c"];

function inputs(section) {
  const v = {};
  for (const el of section.querySelectorAll("input")) v[el.name] = Number(el.value);
  return v;
}

function fmt(x, digits = 3) {
  return Number.isFinite(x) ? x.toExponential(digits) : String(x);
}

// log-log plot of several series sharing one x grid; non-positive y skipped
function logPlot(canvas, xs, series) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = { l: 60, r: 10, t: 10, b: 30 };
  ctx.clearRect(0, 0, w, h);
  const ys = series.flatMap((s) => Array.from(s.y)).filter((y) => y > 0 && Number.isFinite(y));
  if (ys.length === 0) return;
  const lx = [Math.log10(xs[0]), Math.log10(xs[xs.length - 1])];
  let ly = [Math.log10(Math.min(...ys)), Math.log10(Math.max(...ys))];
  ly = [Math.max(ly[0], ly[1] - 30), ly[1] + 0.1];
  const px = (x) => pad.l + ((Math.log10(x) - lx[0]) / (lx[1] - lx[0])) * (w - pad.l - pad.r);
  const py = (y) => h - pad.b - ((Math.log10(y) - ly[0]) / (ly[1] - ly[0])) * (h - pad.t - pad.b);

  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.strokeRect(pad.l, pad.t, w - pad.l - pad.r, h - pad.t - pad.b);
  for (let d = Math.ceil(lx[0]); d <= lx[1]; d++) ctx.fillText(`1e${d}`, px(10 ** d) - 10, h - 12);
  const step = Math.max(1, Math.ceil((ly[1] - ly[0]) / 8));
  for (let d = Math.ceil(ly[0]); d <= ly[1]; d += step) ctx.fillText(`1e${d}`, 8, py(10 ** d) + 4);

  series.forEach((s, k) => {
    ctx.strokeStyle = s.color ?? COLORS[k % COLORS.length];
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    let pen = false;
    xs.forEach((x, i) => {
      const y = s.y[i];
      if (!(y > 0) || Math.log10(y) < ly[0]) { pen = false; return; }
      pen ? ctx.lineTo(px(x), py(y)) : ctx.moveTo(px(x), py(y));
      pen = true;
    });
    ctx.stroke();
  });
}

// diverging map, symmetric about zero
function heatmap(canvas, grid, n) {
  const ctx = canvas.getContext("2d");
  const img = ctx.createImageData(n, n);
  const m = Math.max(...grid.map(Math.abs)) || 1;
  for (let a = 0; a < n; a++) {
    for (let b = 0; b < n; b++) {
      const t = grid[a * n + b] / m;
      const o = 4 * ((n - 1 - a) * n + b); // χ_a1 increases upward
      const s = Math.round(255 * (1 - Math.abs(t)));
      img.data.set(t < 0 ? [s, s, 255, 255] : [255, s, s, 255], o);
    }
  }
  const off = new OffscreenCanvas(n, n);
  off.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.drawImage(off, 0, 0, canvas.width, canvas.height);
  return m;
}

function guard(section, f) {
  const out = section.querySelector(".out");
  try {
    out.classList.remove("err");
    f(out);
  } catch (e) {
    out.classList.add("err");
    out.textContent = e.message ?? String(e);
  }
}

function drawCoherence() {
  const sec = document.getElementById("coherence");
  guard(sec, (out) => {
    const p = inputs(sec);
    const v = coherenceCurve(p.freq, p.temp, p.lambda, p.alpha, p.nu, p.lo, p.hi, POINTS);
    logPlot(sec.querySelector("canvas"), v.subarray(0, POINTS), [{ y: v.subarray(POINTS, 2 * POINTS) }]);
    out.textContent = `tau_opt = ${fmt(v[2 * POINTS])} s, deltaT_min = ${fmt(v[2 * POINTS + 1])} K`;
  });
}

function drawHeatmap() {
  const sec = document.getElementById("heatmap");
  guard(sec, (out) => {
    const p = inputs(sec);
    const n = Math.max(2, Math.min(400, Math.round(p.points)));
    const grid = Array.from(lambdaGrid(p.j, p.delta, p.chimax, n));
    const m = heatmap(sec.querySelector("canvas"), grid, n);
    out.textContent = `chi_b2 to the right, chi_a1 upward, 0 to ${fmt(p.chimax, 2)} Hz; |lambda| max ${fmt(m)} Hz (red > 0, blue < 0)`;
  });
}

function drawCompare() {
  const sec = document.getElementById("compare");
  guard(sec, (out) => {
    const p = inputs(sec);
    const v = strategyCurves(p.freq, p.kappa, p.temp, p.lambda, p.alpha, p.chi, p.lo, p.hi, POINTS);
    const names = ["coherence-mediated", "phase shift", "qubit only"];
    const series = names.map((_, k) => ({ y: v.subarray((k + 1) * POINTS, (k + 2) * POINTS) }));
    logPlot(sec.querySelector("canvas"), v.subarray(0, POINTS), series);
    out.innerHTML = names.map((n, k) => `<span style="color:${COLORS[k]}">&#9632; ${n}</span>`).join("");
  });
}

await init();
const sections = { coherence: drawCoherence, heatmap: drawHeatmap, compare: drawCompare };
for (const [id, draw] of Object.entries(sections)) {
  document.getElementById(id).addEventListener("change", draw);
  draw();
}
