"""Rendering of relations, verdicts, and experiment reports.

Reports print as aligned text tables or deterministic JSON; `write_report`
additionally materializes a report directory with the JSON document, a CSV
of the row data, and a matplotlib figure for the experiment.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .relation import KRelation  # noqa: E402
from .semiring import SECURITY_LEVELS  # noqa: E402


def relation_to_json(rel: KRelation) -> dict:
    return {
        "semiring": rel.ring.name,
        "arity": rel.arity,
        "rows": [{"t": list(t), "v": rel.ring.encode(v.payload)} for t, v in rel.sorted_rows()],
    }


def format_relation(rel: KRelation) -> str:
    if rel.is_empty():
        return f"(empty {rel.arity}-ary {rel.ring.name} relation)"
    lines = []
    for t, v in rel.sorted_rows():
        key = f"({','.join(t)})"
        lines.append(f"{key} -> {rel.ring.text(v.payload)}")
    return "\n".join(lines)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def verdict_lines(verdicts) -> str:
    return "\n".join(json.dumps(v.to_json(), sort_keys=True) for v in verdicts)


def format_table(rows: list, columns: list | None = None) -> str:
    if not rows:
        return "(no rows)"
    columns = columns or list(rows[0])
    data = [columns] + [[str(r.get(c, "")) for c in columns] for r in rows]
    widths = [max(len(row[i]) for row in data) for i in range(len(columns))]
    out = []
    for k, row in enumerate(data):
        out.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
        if k == 0:
            out.append("  ".join("-" * w for w in widths))
    return "\n".join(out)


def format_report(report: dict, max_rows: int = 12) -> str:
    head = [f"experiment: {report['experiment']}"]
    for key, value in report.items():
        if key in ("experiment", "rows", "pass"):
            continue
        if isinstance(value, (str, int, bool, float)):
            head.append(f"{key}: {value}")
        elif isinstance(value, list) and all(isinstance(x, str) for x in value):
            head.append(f"{key}: {', '.join(value)}")
    rows = report.get("rows", [])
    body = format_table(rows[:max_rows])
    if len(rows) > max_rows:
        body += f"\n... ({len(rows) - max_rows} more rows)"
    verdict = "PASS" if report.get("pass") else "FAIL"
    return "\n".join(head) + "\n" + body + f"\nresult: {verdict}"


# ---------------------------------------------------------------------------
# report files: JSON + CSV + figure


def write_report(report: dict, outdir) -> dict:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    name = report["experiment"]
    paths = {
        "json": outdir / f"{name}.json",
        "csv": outdir / f"{name}.csv",
        "png": outdir / f"{name}.png",
    }
    paths["json"].write_text(dumps(report) + "\n")
    _write_csv(report.get("rows", []), paths["csv"])
    fig = _FIGURES.get(name, _figure_generic)(report)
    fig.savefig(paths["png"], dpi=120)
    plt.close(fig)
    return paths


def _write_csv(rows: list, path: Path) -> None:
    columns: list = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns or ["empty"])
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def _figure_generic(report: dict):
    rows = report.get("rows", [])
    ok = sum(1 for r in rows if r.get("ok", True))
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.bar(["ok", "violations"], [ok, len(rows) - ok], color=["tab:green", "tab:red"])
    ax.set_title(report["experiment"])
    ax.set_ylabel("sampled expressions")
    fig.tight_layout()
    return fig


def _figure_bag_division(report: dict):
    ns = [r["n"] for r in report["rows"]]
    values = [int(r["value"]) for r in report["rows"]]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.semilogy(ns, values, "o-", label="observed multiplicity at (a)")
    ax.semilogy(ns, [2 ** n for n in ns], "--", label="2^n")
    ax.set_xlabel("n")
    ax.set_ylabel("multiplicity")
    ax.set_title("division on the witness family")
    ax.legend()
    fig.tight_layout()
    return fig


def _figure_expression_bounds(report: dict):
    rows = report["rows"]
    fig, axes = plt.subplots(1, 2, figsize=(8, 3.2))
    for ax, obs_key, bound_key, label in (
        (axes[0], "supp", "supp_bound", "support size"),
        (axes[1], "hm", "hm_bound", "highest multiplicity"),
    ):
        xs = [max(int(r[bound_key]), 1) for r in rows]
        ys = [max(int(r[obs_key]), 1) for r in rows]
        ax.loglog(xs, ys, ".", alpha=0.6)
        top = max(xs + ys)
        ax.loglog([1, top], [1, top], "--", color="gray", linewidth=1)
        ax.set_xlabel(f"bound on {label}")
        ax.set_ylabel(f"observed {label}")
    fig.suptitle(f"counting bounds on I({report['n']})")
    fig.tight_layout()
    return fig


def _figure_security(report: dict):
    fig, ax = plt.subplots(figsize=(5, 3.2))
    minimal = set(report["minimal_layer"])
    for x in range(42, 48):
        for i, s in enumerate(SECURITY_LEVELS):
            mark = f"({x},{s})" in minimal
            ax.plot(x, i, "s" if mark else ".", color="tab:red" if mark else "tab:blue",
                    markersize=9 if mark else 5)
    ax.set_yticks(range(len(SECURITY_LEVELS)), list(SECURITY_LEVELS))
    ax.set_xlabel("count")
    ax.set_ylabel("level")
    ax.set_title("candidate set and its minimal layer")
    fig.tight_layout()
    return fig


def _figure_value_histogram(report: dict):
    counts: dict = {}
    for row in report["rows"]:
        for v in row["values"]:
            counts[v] = counts.get(v, 0) + 1
    fig, ax = plt.subplots(figsize=(5, 3.2))
    keys = sorted(counts, key=lambda k: (len(k), k))[:15]
    ax.bar(keys, [counts[k] for k in keys], color="tab:blue")
    ax.set_xlabel("annotation")
    ax.set_ylabel("occurrences")
    ax.set_title(report["experiment"])
    ax.tick_params(axis="x", rotation=45)
    fig.tight_layout()
    return fig


_FIGURES = {
    "bag-division": _figure_bag_division,
    "expression-bounds": _figure_expression_bounds,
    "security-no-monus": _figure_security,
    "fuzzy-support": _figure_value_histogram,
    "bag-support-even": _figure_value_histogram,
}
