import init, { boundary_curve, haar_samples, classify, preimage } from "./pkg/sudiag_wasm.js";

const canvas = document.getElementById("plane");
const ctx = canvas.getContext("2d");
const size = canvas.width;
// the unit disk plus a small border
const scale = size / 2.2;

const toScreen = (re, im) => [size / 2 + re * scale, size / 2 - im * scale];
const fromScreen = (x, y) => [(x - size / 2) / scale, (size / 2 - y) / scale];

let marker = null;

function dimension() {
  return Math.min(64, Math.max(1, parseInt(document.getElementById("n").value, 10) || 1));
}

function draw() {
  const n = dimension();
  const count = parseInt(document.getElementById("count").value, 10) || 0;
  const seed = parseInt(document.getElementById("seed").value, 10) || 0;
  ctx.clearRect(0, 0, size, size);

  ctx.strokeStyle = "#ccc";
  ctx.beginPath();
  ctx.arc(size / 2, size / 2, scale, 0, 2 * Math.PI);
  ctx.moveTo(0, size / 2);
  ctx.lineTo(size, size / 2);
  ctx.moveTo(size / 2, 0);
  ctx.lineTo(size / 2, size);
  ctx.stroke();

  const pts = haar_samples(n, count, seed);
  ctx.fillStyle = "rgba(40, 90, 200, 0.35)";
  for (let i = 0; i < pts.length; i += 2) {
    const [x, y] = toScreen(pts[i], pts[i + 1]);
    ctx.fillRect(x, y, 1.5, 1.5);
  }

  const curve = boundary_curve(n, 2048);
  ctx.strokeStyle = "#c22";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  for (let i = 0; i < curve.length; i += 2) {
    const [x, y] = toScreen(curve[i], curve[i + 1]);
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  }
  ctx.closePath();
  ctx.stroke();
  ctx.lineWidth = 1;

  if (marker) {
    const [x, y] = toScreen(marker[0], marker[1]);
    ctx.strokeStyle = "#000";
    ctx.strokeRect(x - 4, y - 4, 8, 8);
  }
}

const fmt = (x) => (x >= 0 ? " " : "") + x.toFixed(6);

function inspect(re, im) {
  const n = dimension();
  marker = [re, im];
  draw();
  const v = classify(n, re, im);
  let text = `z = ${re.toFixed(6)} ${im >= 0 ? "+" : "-"} ${Math.abs(im).toFixed(6)}i\n`;
  text += `status ${v.status}, margin ${v.margin.toExponential(3)}`;
  if (v.winding !== undefined) text += `\nwinding ${v.winding}`;
  document.getElementById("verdict").textContent = text;

  const out = document.getElementById("matrix");
  if (v.status === "Outside" || n < 3) {
    out.textContent = n < 3 ? "preimage solver needs n >= 3" : "";
    return;
  }
  out.textContent = "solving...";
  setTimeout(() => {
    const p = preimage(n, re, im);
    if (p.error !== undefined) {
      out.textContent = p.error;
      return;
    }
    const e = p.entries;
    const rows = [];
    for (let i = 0; i < n; i++) {
      const cells = [];
      for (let j = 0; j < n; j++) {
        const k = 2 * (i * n + j);
        cells.push(`${fmt(e[k])}${e[k + 1] >= 0 ? "+" : "-"}${Math.abs(e[k + 1]).toFixed(6)}i`);
      }
      rows.push(cells.join("  "));
    }
    out.textContent =
      `alpha ${p.alpha.toFixed(6)}, omega ${p.omega.toFixed(6)}, residual ${p.residual.toExponential(2)}\n\n` +
      (n <= 8 ? rows.join("\n") : `${n}x${n} matrix, too wide to show`);
  }, 0);
}

canvas.addEventListener("click", (ev) => {
  const r = canvas.getBoundingClientRect();
  const [re, im] = fromScreen(ev.clientX - r.left, ev.clientY - r.top);
  inspect(re, im);
});
document.getElementById("redraw").addEventListener("click", draw);
document.getElementById("n").addEventListener("change", () => {
  marker = null;
  draw();
});

await init();
draw();
