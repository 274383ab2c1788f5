import init, { Demo } from "./pkg/uq_wasm_demo.js";

const RESOLUTION = 100;
const LO = -8, HI = 8;
const $ = (id) => document.getElementById(id);

let demo = null;
let trained = false;

function status(text) {
  $("status").textContent = text;
}

function colour(t) {
  // white to dark blue
  const v = Math.round(255 * (1 - t));
  return [v, v, 255 - Math.round(120 * t)];
}

function toPixel(x, size) {
  return ((x - LO) / (HI - LO)) * size;
}

function drawSurface(values) {
  const canvas = $("plot");
  const ctx = canvas.getContext("2d");
  const size = canvas.width;
  ctx.clearRect(0, 0, size, size);
  if (values) {
    let min = Infinity, max = -Infinity;
    for (const v of values) { min = Math.min(min, v); max = Math.max(max, v); }
    const span = max > min ? max - min : 1;
    const image = ctx.createImageData(RESOLUTION, RESOLUTION);
    // grid rows run x1 slowest, x2 fastest; canvas y grows downwards
    for (let i = 0; i < RESOLUTION; i++) {
      for (let j = 0; j < RESOLUTION; j++) {
        const [r, g, b] = colour((values[i * RESOLUTION + j] - min) / span);
        const k = 4 * ((RESOLUTION - 1 - j) * RESOLUTION + i);
        image.data.set([r, g, b, 255], k);
      }
    }
    const tmp = document.createElement("canvas");
    tmp.width = tmp.height = RESOLUTION;
    tmp.getContext("2d").putImageData(image, 0, 0);
    ctx.imageSmoothingEnabled = false;
    ctx.drawImage(tmp, 0, 0, size, size);
  }
  const pts = demo.trainPoints();
  for (let k = 0; k < pts.length; k += 3) {
    ctx.fillStyle = pts[k + 2] === 1 ? "#d62728" : "#222";
    ctx.beginPath();
    ctx.arc(toPixel(pts[k], size), size - toPixel(pts[k + 1], size), 2.5, 0, 2 * Math.PI);
    ctx.fill();
  }
}

function fmt(v, digits = 3) {
  return v === null || v === undefined ? "–" : v.toFixed(digits);
}

function drawCurve(points) {
  const rows = points.map((p) =>
    `<tr><td>${p.fraction.toFixed(2)}</td><td>${p.included}</td><td>${fmt(p.auc)}</td>` +
    `<td>${fmt(p.ece)}</td><td>${fmt(p.positive_fraction)}</td></tr>`).join("");
  $("table").innerHTML =
    "<table><tr><th>fraction</th><th>rows</th><th>AUC</th><th>ECE</th><th>positives</th></tr>" +
    rows + "</table>";
}

function resetData() {
  try {
    demo = new Demo($("mode").value, Number($("seed").value) >>> 0);
    trained = false;
    $("table").innerHTML = "";
    drawSurface(null);
    status("data ready, pick a method and train");
  } catch (e) {
    status(`error: ${e}`);
  }
}

function repaint() {
  if (!trained) return;
  try {
    drawSurface(demo.surface(RESOLUTION, $("layer").value));
    status(`${$("method").value}: ${$("layer").value}`);
  } catch (e) {
    status(`error: ${e}`);
  }
}

function run(label, work) {
  status(`${label}…`);
  // let the status line paint before the blocking call
  setTimeout(() => {
    const start = performance.now();
    try {
      work();
      status(`${label} done in ${((performance.now() - start) / 1000).toFixed(1)} s`);
    } catch (e) {
      status(`error: ${e}`);
    }
  }, 20);
}

await init();
resetData();

$("mode").addEventListener("change", resetData);
$("seed").addEventListener("change", resetData);
$("layer").addEventListener("change", repaint);
$("train").addEventListener("click", () =>
  run(`training ${$("method").value}`, () => {
    demo.train($("method").value, $("weighting").checked);
    trained = true;
    if ($("method").value !== "vae" && $("layer").value === "novelty") $("layer").value = "entropy";
    drawSurface(demo.surface(RESOLUTION, $("layer").value));
    $("table").innerHTML = "";
  }));
$("curve").addEventListener("click", () => {
  if (!trained) { status("train a method first"); return; }
  run("scoring held-out points", () => drawCurve(JSON.parse(demo.curve())));
});
