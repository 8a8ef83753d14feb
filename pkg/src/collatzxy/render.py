"""Text / JSON / CSV rendering of trajectory, claim and sweep documents.

Every document is first built as a JSON-ready dict (the machine contract) and
the text and CSV forms are derived from that dict, so ``report`` can re-render
a saved JSON file without recomputing anything.  Exact rationals appear as
"p/q" strings and start values as decimal strings; no float is emitted.
"""

from __future__ import annotations

import csv
import io
import json

from .claims import FALSIFIED, get_claim


def to_json_text(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def any_falsified(doc: dict) -> bool:
    kind = doc.get("kind")
    if kind == "claims":
        return any(r["verdict"] == FALSIFIED for r in doc["results"])
    if kind == "sweep":
        return any(t["verdict"] == FALSIFIED for t in doc["claim_tallies"].values())
    return False


def _witness_text(w: dict) -> str:
    if "a" in w:
        head = f"({w['a']}, {w['b']})"
    else:
        head = f"n={w['n']}"
    rest = ", ".join(f"{k}={v}" for k, v in w.items() if k not in ("n", "a", "b"))
    return f"{head} {rest}".rstrip()


# -- text -------------------------------------------------------------------

def _trajectory_text(doc: dict) -> list[str]:
    lines = [
        f"n = {doc['n']}",
        f"k = {doc['k']}  X = {doc['x']}  Y = {doc['y']}  peak = {doc['peak']}",
    ]
    if "tuple" in doc:
        lines.append(f"{doc['k']}-tuple = ({', '.join(doc['tuple'])})")
    ex = doc.get("exact")
    if ex:
        lines += [
            f"Z = {ex['z']}",
            f"eps = {ex['epsilon']}",
            f"eps_n = {ex['epsilon_n']}",
            f"n' = {ex['n_prime']}",
            f"{{n'}} = {ex['frac_n_prime']}",
            f"floor(n') = {ex['floor_n_prime']}",
            f"f = {ex['f']}",
        ]
    return lines


def _claim_text(r: dict, indent: str = "") -> list[str]:
    rng = f"[{r['range']['lo']}, {r['range']['hi']}]"
    try:
        title = get_claim(r["claim_id"]).citation
    except KeyError:
        title = "relaxed form"
    lines = [
        f"{indent}{r['claim_id']} ({title}) {r['verdict']} on {rng}: "
        f"{r['checked_count']} checked, {r['falsified_count']} violations, "
        f"{r['indeterminate_count']} indeterminate"
    ]
    for w in r["counterexamples"]:
        lines.append(f"{indent}  counterexample {_witness_text(w)}")
    for w in r["indeterminate"]:
        lines.append(f"{indent}  indeterminate {_witness_text(w)}")
    if r.get("note"):
        lines.append(f"{indent}  note: {r['note']}")
    if r.get("companion"):
        lines += _claim_text(r["companion"], indent + "  ")
    return lines


def _sweep_text(doc: dict) -> list[str]:
    lines = [
        f"range [{doc['range']['lo']}, {doc['range']['hi']}]  count = {doc['count']}  complete = {doc['complete']}",
        f"max k = {doc['max_k']} at n = {doc['argmax_n']}",
        f"max peak = {doc['max_peak']} at n = {doc['argmax_peak_n']}",
        f"distinct (X, Y) = {len(doc['xy_histogram'])} (+{doc['xy_histogram_overflow']} capped)",
        f"over budget = {doc['over_budget_count']}",
    ]
    for w in doc["over_budget"]:
        lines.append(f"  {_witness_text(w)}")
    for cid, t in doc["claim_tallies"].items():
        lines.append(
            f"{cid} {t['verdict']}: {t['verified']} verified, {t['falsified']} falsified, "
            f"{t['indeterminate']} indeterminate"
        )
        for w in t["witnesses"]:
            lines.append(f"  counterexample {_witness_text(w)}")
    for key in ("wall_time_ms", "throughput_per_s", "extrapolation"):
        if key in doc:
            lines.append(f"{key} = {doc[key]}")
    lines.append(f"note: {doc['note']}")
    return lines


def to_text(doc: dict) -> str:
    kind = doc.get("kind")
    if kind == "trajectory":
        lines = _trajectory_text(doc)
    elif kind == "claims":
        lines = [line for r in doc["results"] for line in _claim_text(r)]
    elif kind == "sweep":
        lines = _sweep_text(doc)
    else:
        raise ValueError(f"unknown document kind {kind!r}")
    if "wall_time_ms" in doc and kind != "sweep":
        lines.append(f"wall_time_ms = {doc['wall_time_ms']}")
    return "\n".join(lines) + "\n"


# -- csv --------------------------------------------------------------------

def to_csv(doc: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    kind = doc.get("kind")
    if kind == "trajectory":
        w.writerow(["field", "value"])
        for key in ("n", "k", "x", "y", "peak"):
            w.writerow([key, doc[key]])
        if "tuple" in doc:
            w.writerow(["tuple", " ".join(doc["tuple"])])
        for key, value in doc.get("exact", {}).items():
            w.writerow([key, value])
    elif kind == "claims":
        w.writerow(["claim_id", "lo", "hi", "verdict", "checked_count", "falsified_count",
                    "indeterminate_count", "minimal_witness"])
        rows = []
        for r in doc["results"]:
            rows.append(r)
            if r.get("companion"):
                rows.append(r["companion"])
        for r in rows:
            first = r["counterexamples"][:1] or r["indeterminate"][:1]
            w.writerow([
                r["claim_id"], r["range"]["lo"], r["range"]["hi"], r["verdict"], r["checked_count"],
                r["falsified_count"], r["indeterminate_count"],
                json.dumps(first[0], separators=(",", ":")) if first else "",
            ])
    elif kind == "sweep":
        w.writerow(["section", "key", "value"])
        for key in ("count", "complete", "max_k", "argmax_n", "max_peak", "argmax_peak_n",
                    "xy_histogram_overflow", "over_budget_count", "wall_time_ms", "throughput_per_s"):
            if key in doc:
                w.writerow(["summary", key, doc[key]])
        w.writerow(["summary", "lo", doc["range"]["lo"]])
        w.writerow(["summary", "hi", doc["range"]["hi"]])
        for cid, t in doc["claim_tallies"].items():
            for key in ("verdict", "verified", "falsified", "indeterminate"):
                w.writerow([f"claim:{cid}", key, t[key]])
        for x, y, c in doc["xy_histogram"]:
            w.writerow(["xy_histogram", f"{x}:{y}", c])
        w.writerow(["note", "note", doc["note"]])
    else:
        raise ValueError(f"unknown document kind {kind!r}")
    return buf.getvalue()


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return to_json_text(doc)
    if fmt == "csv":
        return to_csv(doc)
    return to_text(doc)
