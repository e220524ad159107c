import init, { Demo, in_degree_bound } from "./pkg/coxnet_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const CAP = 1, EXPONENT = 4;
let demo = null;

function resample() {
  if (demo) demo.free();
  try {
    demo = new Demo($("model").value, num("side"), num("lambda"), num("seed"));
  } catch (e) {
    demo = null;
    $("status").textContent = String(e);
    return;
  }
  redraw();
  tabulate();
}

function redraw() {
  if (!demo) return;
  const gamma = num("gamma");
  try {
    $("plot").innerHTML = demo.sinr_svg(CAP, EXPONENT, num("noise"), num("tau"), gamma, $("overlay").checked);
    const bound = gamma > 0 ? in_degree_bound(num("tau"), gamma) : "none";
    $("status").textContent = `${demo.points()} points, gamma ${gamma}, in-degree bound ${bound}`;
  } catch (e) {
    $("status").textContent = String(e);
  }
}

function tabulate() {
  if (!demo) return;
  const gammas = [0, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2];
  try {
    const counts = demo.edge_counts(CAP, EXPONENT, num("noise"), num("tau"), new Float64Array(gammas));
    $("counts").innerHTML = "<tr><th>&gamma;</th><th>edges</th></tr>" +
      gammas.map((g, i) => `<tr><td>${g}</td><td>${counts[i]}</td></tr>`).join("");
  } catch (e) {
    $("counts").innerHTML = "";
  }
}

await init();
for (const id of ["model", "side", "lambda", "seed"]) $(id).addEventListener("change", resample);
for (const id of ["noise", "tau"]) $(id).addEventListener("change", () => { redraw(); tabulate(); });
$("gamma").addEventListener("input", redraw);
$("overlay").addEventListener("change", redraw);
$("resample").addEventListener("click", () => { $("seed").value = num("seed") + 1; resample(); });
resample();
