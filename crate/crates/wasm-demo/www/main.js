import init, { shGrid, coupleVectors, coupleLabels, radialCurves } from "./pkg/irrepcore_wasm.js";

const $ = (id) => document.getElementById(id);

function drawHarmonic() {
  const canvas = $("sh-canvas");
  const ctx = canvas.getContext("2d");
  const l = Number($("sh-l").value);
  const m = Number($("sh-m").value);
  const nt = 90, np = 180;
  let grid;
  try {
    grid = shGrid(l, m, nt, np);
    $("sh-err").textContent = "";
  } catch (e) {
    $("sh-err").textContent = e.message ?? String(e);
    return;
  }
  let peak = 0;
  for (const v of grid) peak = Math.max(peak, Math.abs(v));
  const img = ctx.createImageData(np, nt);
  for (let i = 0; i < grid.length; i++) {
    const t = peak > 0 ? grid[i] / peak : 0;
    const a = Math.round(255 * (1 - Math.abs(t)));
    img.data[4 * i] = t > 0 ? 255 : a;
    img.data[4 * i + 1] = a;
    img.data[4 * i + 2] = t < 0 ? 255 : a;
    img.data[4 * i + 3] = 255;
  }
  const tmp = new OffscreenCanvas(np, nt);
  tmp.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(tmp, 0, 0, canvas.width, canvas.height);
}

function parseVec(s) {
  const v = s.split(",").map(Number);
  return v.length === 3 && v.every(Number.isFinite) ? v : null;
}

function showCoupling() {
  const u = parseVec($("u").value);
  const v = parseVec($("v").value);
  const table = $("couple");
  if (!u || !v) {
    table.innerHTML = '<tr><td class="err">enter vectors as x, y, z</td></tr>';
    return;
  }
  const vals = coupleVectors(...u, ...v);
  const labels = coupleLabels();
  let html = "<tr><th>l</th><th>m</th><th>value</th></tr>";
  labels.forEach((lab, i) => {
    const [l, m] = lab.split(",");
    html += `<tr><td>${l}</td><td>${m}</td><td>${vals[i].toFixed(6)}</td></tr>`;
  });
  table.innerHTML = html;
}

function drawRadial() {
  const canvas = $("rb-canvas");
  const ctx = canvas.getContext("2d");
  const count = Number($("rb-count").value);
  const cutoff = Number($("rb-cutoff").value);
  const samples = 300;
  let curves;
  try {
    curves = radialCurves($("rb-kind").value, count, cutoff, samples);
    $("rb-err").textContent = "";
  } catch (e) {
    $("rb-err").textContent = e.message ?? String(e);
    return;
  }
  const w = canvas.width, h = canvas.height, pad = 20;
  ctx.clearRect(0, 0, w, h);
  let top = 0;
  for (const v of curves) top = Math.max(top, v);
  top = top || 1;
  const x = (s) => pad + (w - 2 * pad) * s / (samples - 1);
  const y = (v) => h - pad - (h - 2 * pad) * v / top;
  ctx.strokeStyle = "#999";
  ctx.setLineDash([4, 4]);
  ctx.beginPath();
  ctx.moveTo(x((samples - 1) / 1.2), pad);
  ctx.lineTo(x((samples - 1) / 1.2), h - pad);
  ctx.stroke();
  ctx.setLineDash([]);
  for (let k = 0; k < count; k++) {
    ctx.strokeStyle = `hsl(${(360 * k) / count}, 70%, 45%)`;
    ctx.beginPath();
    for (let s = 0; s < samples; s++) {
      const v = curves[k * samples + s];
      s === 0 ? ctx.moveTo(x(s), y(v)) : ctx.lineTo(x(s), y(v));
    }
    ctx.stroke();
  }
}

await init();
for (const id of ["sh-l", "sh-m"]) $(id).addEventListener("input", drawHarmonic);
for (const id of ["u", "v"]) $(id).addEventListener("input", showCoupling);
for (const id of ["rb-kind", "rb-count", "rb-cutoff"]) $(id).addEventListener("input", drawRadial);
drawHarmonic();
showCoupling();
drawRadial();
