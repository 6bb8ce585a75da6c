import init, { levels, alpha, deer } from "./pkg/p1spin_web.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const $ = (id) => document.getElementById(id);

function plot(canvas, x, series, opts = {}) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  const ys = series.flatMap((s) => s.y);
  const [x0, x1] = [Math.min(...x), Math.max(...x)];
  const [y0, y1] = [Math.min(0, ...ys), Math.max(...ys)];
  const px = (v) => pad + ((v - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const py = (v) => h - pad - ((v - y0) / (y1 - y0 || 1)) * (h - 2 * pad);

  ctx.strokeStyle = "#888";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#333";
  ctx.fillText(x0.toPrecision(3), pad, h - pad + 14);
  ctx.fillText(x1.toPrecision(3), w - pad - 20, h - pad + 14);
  ctx.fillText(y1.toPrecision(4), 2, pad + 4);
  ctx.fillText(y0.toPrecision(4), 2, h - pad);
  if (opts.xlabel) ctx.fillText(opts.xlabel, w / 2, h - 8);

  series.forEach((s, k) => {
    ctx.strokeStyle = COLORS[k % COLORS.length];
    ctx.setLineDash(s.name.includes("off-axis") ? [5, 3] : []);
    ctx.beginPath();
    s.y.forEach((v, i) => (i ? ctx.lineTo(px(x[i]), py(v)) : ctx.moveTo(px(x[i]), py(v))));
    ctx.stroke();
    ctx.fillStyle = ctx.strokeStyle;
    ctx.fillText(s.name, w - pad - 90, pad + 14 * (k + 1));
  });
  ctx.setLineDash([]);
  for (const st of opts.sticks ?? []) {
    ctx.strokeStyle = st.class === "nuclear" ? "#d62728" : st.class === "electron" ? "#1f77b4" : "#aaa";
    ctx.beginPath();
    ctx.moveTo(px(st.frequency), py(0));
    ctx.lineTo(px(st.frequency), py(st.amplitude * y1));
    ctx.stroke();
  }
}

function guarded(fn) {
  return () => {
    try {
      fn();
      $("status").textContent = "";
    } catch (e) {
      $("status").textContent = String(e);
      $("status").className = "err";
    }
  };
}

const drawLevels = guarded(() => {
  const d = JSON.parse(levels(Number($("lv-bmax").value), 201, $("lv-orient").value));
  plot($("lv-plot"), d.x, d.series, { xlabel: "B (G) vs energy (MHz)" });
});

const drawAlpha = guarded(() => {
  const d = JSON.parse(alpha($("al-t").value, $("al-orient").value, Number($("al-bmin").value), Number($("al-bmax").value), 181));
  plot($("al-plot"), d.x, d.series, { xlabel: "B (G) vs alpha_raw" });
});

const drawDeer = guarded(() => {
  $("de-bval").textContent = $("de-b").value;
  const d = JSON.parse(deer(Number($("de-b").value), Number($("de-w").value)));
  plot($("de-plot"), d.x, [{ name: "broadened", y: d.y }], { xlabel: "frequency (MHz)", sticks: d.sticks });
});

await init();
$("lv-go").onclick = drawLevels;
$("al-go").onclick = drawAlpha;
$("de-b").oninput = drawDeer;
$("de-w").onchange = drawDeer;
drawLevels();
drawAlpha();
drawDeer();
