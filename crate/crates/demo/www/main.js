import init, { tau0_spectrum, boundary_eigenvalues, s2_curve } from "./pkg/lgt_renyi_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const int = (id) => Math.round(num(id));
const out = $("out");

function amplitudes() {
  return [num("alpha"), num("beta"), num("gamma"), num("delta")];
}

function show(text, bad = false) {
  out.textContent = text;
  out.className = bad ? "err" : "";
}

function guarded(f) {
  return () => {
    try {
      f();
    } catch (e) {
      show(String(e.message ?? e), true);
    }
  };
}

function plot(xs, ys, xlabel, ylabel) {
  const cv = $("plot");
  const g = cv.getContext("2d");
  const pad = 50;
  const w = cv.width - 2 * pad;
  const h = cv.height - 2 * pad;
  g.clearRect(0, 0, cv.width, cv.height);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  if (y1 === y0) {
    y0 -= 1;
    y1 += 1;
  }
  const px = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * w;
  const py = (y) => pad + h - ((y - y0) / (y1 - y0)) * h;

  g.strokeStyle = "#888";
  g.strokeRect(pad, pad, w, h);
  g.fillStyle = "#333";
  g.font = "12px system-ui";
  g.fillText(xlabel, pad + w / 2, cv.height - 10);
  g.fillText(ylabel, 5, pad - 10);
  g.fillText(x0.toPrecision(3), pad, pad + h + 15);
  g.fillText(x1.toPrecision(3), pad + w - 20, pad + h + 15);
  g.fillText(y1.toPrecision(4), 2, pad + 4);
  g.fillText(y0.toPrecision(4), 2, pad + h);

  g.strokeStyle = "#1f5fbf";
  g.beginPath();
  xs.forEach((x, i) => (i ? g.lineTo(px(x), py(ys[i])) : g.moveTo(px(x), py(ys[i]))));
  g.stroke();
  g.fillStyle = "#1f5fbf";
  xs.forEach((x, i) => g.fillRect(px(x) - 2, py(ys[i]) - 2, 4, 4));
}

function spectrumView() {
  const l = tau0_spectrum(...amplitudes());
  show(l.map((v, i) => `lambda${i + 1} = ${v.toPrecision(12)}`).join("\n"));
  plot([1, 2, 3, 4], Array.from(l), "mu", "lambda");
}

function boundaryView() {
  const v = boundary_eigenvalues(...amplitudes(), int("n1"));
  const rs = Array.from(v.slice(1), (_, i) => i + 1);
  const lines = [`rho1 = ${v[0].toPrecision(15)}`];
  rs.forEach((r) => lines.push(`rho1'(R1=${r}) = ${v[r].toPrecision(15)}`));
  show(lines.join("\n"));
  plot(rs, Array.from(v.slice(1)), "R1", "rho1'");
}

function curveView() {
  const [a, b, g] = amplitudes();
  const [dmin, dmax, n] = [num("dmin"), num("dmax"), int("points")];
  const t0 = performance.now();
  const s = s2_curve(a, b, g, dmin, dmax, n, int("n1"), int("n2"), int("r1"), int("r2"));
  const xs = Array.from(s, (_, i) => dmin + ((dmax - dmin) * i) / (n - 1));
  show(`${n} points in ${(performance.now() - t0).toFixed(0)} ms; S2 from ${Math.min(...s).toPrecision(6)} to ${Math.max(...s).toPrecision(6)}`);
  plot(xs, Array.from(s), "delta", "S2");
}

await init();
$("btn-spectrum").onclick = guarded(spectrumView);
$("btn-boundary").onclick = guarded(boundaryView);
$("btn-curve").onclick = guarded(curveView);
guarded(boundaryView)();
