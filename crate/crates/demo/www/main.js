import init, { decision_map, cv_scores, consistency_curve } from "./pkg/nss_demo.js";

const COLORS = [[230, 90, 80], [70, 140, 220], [90, 180, 100]];
const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function drawMap() {
  const res = 160;
  const map = decision_map(num("spread"), num("sigma"), num("perClass"), BigInt(num("mapSeed")), res);
  const canvas = $("map");
  const ctx = canvas.getContext("2d");
  const size = canvas.width;
  const grid = map.grid();
  const img = ctx.createImageData(res, res);
  for (let i = 0; i < grid.length; i++) {
    const [r, g, b] = COLORS[grid[i] - 1];
    img.data.set([r, g, b, 70], 4 * i);
  }
  const off = new OffscreenCanvas(res, res);
  off.getContext("2d").putImageData(img, 0, 0);
  ctx.clearRect(0, 0, size, size);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(off, 0, 0, size, size);

  const e = map.extent();
  const px = (x) => ((x + e) / (2 * e)) * size;
  const py = (y) => ((e - y) / (2 * e)) * size;
  const pts = map.points();
  const labels = map.labels();
  for (let i = 0; i < labels.length; i++) {
    const [r, g, b] = COLORS[labels[i] - 1];
    ctx.fillStyle = `rgb(${r},${g},${b})`;
    ctx.beginPath();
    ctx.arc(px(pts[2 * i]), py(pts[2 * i + 1]), 2.5, 0, 2 * Math.PI);
    ctx.fill();
  }
  const lines = map.lines();
  ctx.lineWidth = 2;
  for (let k = 0; k < 3; k++) {
    const [mx, my, dx, dy] = lines.slice(4 * k, 4 * k + 4);
    const [r, g, b] = COLORS[k];
    ctx.strokeStyle = `rgb(${r * 0.6},${g * 0.6},${b * 0.6})`;
    ctx.beginPath();
    ctx.moveTo(px(mx - 3 * dx), py(my - 3 * dy));
    ctx.lineTo(px(mx + 3 * dx), py(my + 3 * dy));
    ctx.stroke();
  }
}

function runCv() {
  const s = cv_scores($("generator").value, num("cvSamples"), num("folds"), BigInt(num("cvSeed")));
  const dims = s.dims();
  const acc = s.accuracies();
  const rows = ["<tr><th>d</th><th>mean CV accuracy</th></tr>"];
  dims.forEach((d, i) => {
    const cls = d === s.chosen() ? ' class="chosen"' : "";
    rows.push(`<tr${cls}><td>${d}</td><td>${(100 * acc[i]).toFixed(2)}%</td></tr>`);
  });
  $("cvTable").innerHTML = rows.join("");
}

function runCurve() {
  const c = consistency_curve(num("alpha"), num("trials"), BigInt(num("curveSeed")));
  const sizes = Array.from(c.sizes());
  const series = [
    { name: "median gap", values: Array.from(c.median_gaps()), color: "rgb(200,60,50)" },
    { name: "median bound", values: Array.from(c.median_bounds()), color: "rgb(60,110,200)" },
  ];
  const canvas = $("curve");
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 50;
  ctx.clearRect(0, 0, w, h);
  const lx = sizes.map(Math.log10);
  const x0 = Math.min(...lx), x1 = Math.max(...lx);
  const ymax = Math.max(1e-3, ...series.flatMap((s) => s.values)) * 1.1;
  const px = (v) => pad + ((v - x0) / (x1 - x0)) * (w - 2 * pad);
  const py = (v) => h - pad - (Math.max(v, 0) / ymax) * (h - 2 * pad);

  ctx.strokeStyle = "#888";
  ctx.fillStyle = "#333";
  ctx.font = "12px sans-serif";
  ctx.beginPath();
  ctx.moveTo(pad, pad);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - pad, h - pad);
  ctx.stroke();
  sizes.forEach((n, i) => ctx.fillText(String(n), px(lx[i]) - 10, h - pad + 18));
  ctx.fillText("training size (log scale)", w / 2 - 60, h - 10);
  ctx.fillText(ymax.toFixed(3), 5, pad + 4);
  ctx.fillText("0", pad - 15, h - pad + 4);

  series.forEach((s, j) => {
    ctx.strokeStyle = s.color;
    ctx.fillStyle = s.color;
    ctx.beginPath();
    s.values.forEach((v, i) => (i ? ctx.lineTo(px(lx[i]), py(v)) : ctx.moveTo(px(lx[i]), py(v))));
    ctx.stroke();
    s.values.forEach((v, i) => ctx.fillRect(px(lx[i]) - 3, py(v) - 3, 6, 6));
    ctx.fillText(s.name, w - pad - 90, pad + 16 * j);
  });
}

function guarded(f) {
  return () => {
    try {
      f();
      $("status").textContent = "";
    } catch (err) {
      $("status").textContent = String(err);
    }
  };
}

await init();
for (const id of ["spread", "sigma", "perClass", "mapSeed"]) {
  $(id).addEventListener("input", guarded(drawMap));
}
$("runCv").addEventListener("click", guarded(runCv));
$("runCurve").addEventListener("click", guarded(runCurve));
guarded(drawMap)();
guarded(runCv)();
