import init, { maxima_density, analytic_bound, monte_carlo } from "./pkg/pplcap_web.js";

const $ = (id) => document.getElementById(id);

function model() {
  return {
    domain: $("domain").value,
    n: Number($("n").value),
    continuous: $("continuous").checked,
    alpha: Number($("alpha").value),
  };
}

function plot(svg, xs, ys, opts = {}) {
  const w = svg.width.baseVal.value, h = svg.height.baseVal.value, pad = 40;
  const tx = opts.logX ? Math.log10 : (x) => x;
  const px = xs.map(tx);
  const x0 = Math.min(...px), x1 = Math.max(...px);
  const y0 = opts.yMin ?? Math.min(...ys), y1 = Math.max(...ys);
  const sx = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const sy = (y) => h - pad - ((y - y0) / (y1 - y0 || 1)) * (h - 2 * pad);
  const d = px.map((x, i) => `${i ? "L" : "M"}${sx(x).toFixed(1)} ${sy(ys[i]).toFixed(1)}`).join(" ");
  const fx = (v) => (opts.logX ? `1e${v.toFixed(0)}` : v.toPrecision(3));
  svg.innerHTML = `
    <path d="M${pad} ${pad} V${h - pad} H${w - pad}" fill="none" stroke="#000"/>
    <path d="${d}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>
    <text x="${pad - 4}" y="${h - pad}" text-anchor="end" font-size="11">${y0.toPrecision(3)}</text>
    <text x="${pad - 4}" y="${pad + 4}" text-anchor="end" font-size="11">${y1.toPrecision(3)}</text>
    <text x="${pad}" y="${h - pad + 14}" text-anchor="middle" font-size="11">${fx(x0)}</text>
    <text x="${w - pad}" y="${h - pad + 14}" text-anchor="middle" font-size="11">${fx(x1)}</text>
    <text x="${w / 2}" y="${h - 6}" text-anchor="middle" font-size="12">${opts.xLabel ?? ""}</text>`;
}

function guard(out, f) {
  try {
    f();
  } catch (e) {
    out.textContent = `error: ${e}`;
  }
}

function peakLabel(domain) {
  return domain === "real" ? "peak |x|" : "peak |x|^2";
}

await init();

$("run-maxima").onclick = () => {
  const p = model();
  guard($("maxima-out"), () => {
    const r = JSON.parse(maxima_density(p.domain, p.continuous, p.n, p.alpha, 400));
    plot($("maxima-plot"), r.v, r.pdf, { yMin: 0, xLabel: peakLabel(p.domain) });
  });
};

$("run-bound").onclick = () => {
  const p = model();
  guard($("bound-out"), () => {
    const r = JSON.parse(analytic_bound(p.domain, p.continuous, p.n, p.alpha, 400));
    $("bound-out").textContent =
      `gamma >= ${r.gamma.toFixed(6)}   (sampled-only limit ${r.gamma_upper.toFixed(6)})\n` +
      `integrand peak at ${r.argmax.toFixed(4)}`;
    plot($("bound-plot"), r.v, r.profile, { yMin: 0, xLabel: `${peakLabel(p.domain)} (integrand, normalized)` });
  });
};

$("run-mc").onclick = () => {
  const p = model();
  const out = $("mc-out");
  out.textContent = "running...";
  setTimeout(() => guard(out, () => {
    const t = performance.now();
    const r = JSON.parse(monte_carlo(p.domain, p.n, Number($("m").value), Number($("nsim").value), Number($("seed").value)));
    const secs = ((performance.now() - t) / 1000).toFixed(1);
    out.textContent = `gamma = ${r.gamma.toFixed(5)} +- ${r.stderr.toFixed(5)}   (${secs} s)`;
    plot($("mc-plot"), r.trace.map((q) => q[0]), r.trace.map((q) => q[1]), { logX: true, xLabel: "vectors" });
  }), 10);
};
