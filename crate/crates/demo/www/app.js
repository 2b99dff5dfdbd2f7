import init, { fit_times, sample_times, stability, metrics } from "./pkg/hdsurvey_demo.js";

const $ = (id) => document.getElementById(id);
const fmt = (v, d = 3) => Number(v).toFixed(d);

function fail(el, e) {
  el.innerHTML = `<p class="err">${e}</p>`;
}

function plotFit(view) {
  const c = $("fit-plot");
  const g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  const { edges, density } = view.histogram;
  const x0 = edges[0], x1 = edges[edges.length - 1];
  let ymax = Math.max(...density);
  for (const cv of view.curves) ymax = Math.max(ymax, ...cv.y.filter(Number.isFinite));
  const px = (x) => 40 + (x - x0) / (x1 - x0) * (c.width - 60);
  const py = (y) => c.height - 25 - y / ymax * (c.height - 40);

  g.fillStyle = "#cfd8e3";
  density.forEach((d, i) => {
    g.fillRect(px(edges[i]), py(d), px(edges[i + 1]) - px(edges[i]) - 1, py(0) - py(d));
  });
  const colors = ["#d0502a", "#2a7bd0"];
  view.curves.forEach((cv, k) => {
    g.strokeStyle = colors[k % colors.length];
    g.lineWidth = 2;
    g.beginPath();
    cv.x.forEach((x, i) => (i ? g.lineTo(px(x), py(cv.y[i])) : g.moveTo(px(x), py(cv.y[i]))));
    g.stroke();
    g.fillStyle = g.strokeStyle;
    g.fillText(`${cv.family}  AIC ${fmt(cv.aic, 2)}`, 50, 15 + 14 * k);
  });
  g.fillStyle = "#444";
  g.fillText(fmt(x0, 2), px(x0), c.height - 8);
  g.fillText(fmt(x1, 2), px(x1) - 30, c.height - 8);
}

function runFit() {
  try {
    const view = JSON.parse(fit_times($("times-input").value));
    $("fit-out").innerHTML =
      `<p>${view.n} times; best fit <b>${view.best}</b>, mean ${fmt(view.mean)} minutes</p>`;
    plotFit(view);
  } catch (e) {
    fail($("fit-out"), e);
  }
}

function runStability() {
  const out = $("s-out");
  out.textContent = "running…";
  // let the status paint before the synchronous run
  setTimeout(() => {
    try {
      const v = JSON.parse(stability(
        Number($("s-strength").value), Number($("s-n").value), Number($("s-iter").value),
        Number($("s-k").value), Number($("s-seed").value)));
      let html = "<table><tr><th>rank</th><th>feature</th>" +
        v.models.map((m) => `<th>${m}</th>`).join("") + "<th>mean</th></tr>";
      v.consensus.forEach((f, r) => {
        const cls = v.signal.includes(f) ? ' class="signal"' : "";
        html += `<tr${cls}><td>${r + 1}</td><td>${v.features[f]}</td>` +
          v.frequencies.map((row) => `<td>${fmt(row[f], 2)}</td>`).join("") +
          `<td>${fmt(v.mean[f], 2)}</td></tr>`;
      });
      out.innerHTML = html + "</table><p>Bold rows carry the planted signal.</p>";
    } catch (e) {
      fail(out, e);
    }
  }, 10);
}

function runMetrics() {
  try {
    const n = (id) => Math.max(0, Math.floor(Number($(id).value) || 0));
    const v = JSON.parse(metrics(n("m-tp"), n("m-fp"), n("m-tn"), n("m-fn")));
    const m = v.metrics;
    const undef = Object.entries(m.undefined).filter(([, b]) => b).map(([k]) => k);
    $("m-out").innerHTML = "<table>" +
      ["accuracy", "precision", "recall", "specificity", "f1"]
        .map((k) => `<tr><td>${k}</td><td>${fmt(m[k], 4)}</td></tr>`).join("") +
      "</table>" + (undef.length ? `<p>undefined (reported as 0): ${undef.join(", ")}</p>` : "");
  } catch (e) {
    fail($("m-out"), e);
  }
}

await init();

$("gen-full").onclick = () => {
  $("times-input").value = sample_times(Number($("gen-n").value), false, Date.now() % 1e9);
  runFit();
};
$("gen-reduced").onclick = () => {
  $("times-input").value = sample_times(Number($("gen-n").value), true, Date.now() % 1e9);
  runFit();
};
$("fit").onclick = runFit;
$("s-strength").oninput = () => ($("s-strength-v").textContent = $("s-strength").value);
$("s-run").onclick = runStability;
for (const id of ["m-tp", "m-fp", "m-tn", "m-fn"]) $(id).oninput = runMetrics;

$("times-input").value = sample_times(300, false, 7);
runFit();
runMetrics();
