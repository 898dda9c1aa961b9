// Build with: wasm-pack build crates/web --target web --out-dir www/pkg
import init, { solve, soulmate_table, census } from "./pkg/smseq_web.js";

const $ = (id) => document.getElementById(id);

function guard(out, f) {
  try {
    f();
  } catch (e) {
    out.innerHTML = "";
    const p = document.createElement("p");
    p.className = "error";
    p.textContent = String(e);
    out.appendChild(p);
  }
}

function table(head, rows) {
  const t = document.createElement("table");
  const tr = t.insertRow();
  for (const h of head) {
    const th = document.createElement("th");
    th.textContent = h;
    tr.appendChild(th);
  }
  for (const r of rows) {
    const row = t.insertRow();
    for (const c of r) row.insertCell().textContent = c;
  }
  return t;
}

function describe(m) {
  const pairs = m.couples.map((c) => `m${c.man}-w${c.woman}`).join(" ");
  return `${pairs}  cost ${m.egalitarian_cost}`;
}

await init();

$("solve").onclick = () => guard($("solve-out"), () => {
  const r = JSON.parse(solve($("profile").value));
  const lines = [
    `men proposing:   ${describe(r.men_proposing)}  rounds ${r.men_proposing.rounds}`,
    `women proposing: ${describe(r.women_proposing)}  rounds ${r.women_proposing.rounds}`,
  ];
  if (r.stable_matchings) {
    lines.push("", `${r.stable_matchings.length} stable matching(s):`);
    for (const m of r.stable_matchings) lines.push("  " + describe(m));
  }
  $("solve-out").textContent = lines.join("\n");
});

$("table").onclick = () => guard($("table-out"), () => {
  const n = Number($("table-n").value);
  const r = JSON.parse(soulmate_table(n));
  const head = ["n"].concat([...Array(n + 1).keys()].map((k) => `k=${k}`));
  const rows = r.rows.map((row, i) => [i + 1].concat(row));
  $("table-out").replaceChildren(table(head, rows));
});

$("census").onclick = () => guard($("census-out"), () => {
  const stat = $("census-stat").value;
  const r = JSON.parse(census(Number($("census-n").value), $("census-family").value, stat));
  const rows = Object.entries(r.histograms[stat]).sort((a, b) => a[0] - b[0]);
  const t = table(["value", "count"], rows);
  const note = document.createElement("p");
  note.textContent = `${r.profiles} profiles`;
  $("census-out").replaceChildren(t, note);
});
