"""Log-log convergence figures for study CSV output.

Renders one line per method (error versus budget, log-log, base-10 axes)
plus dashed slope guide lines anchored at the first plotted data point so
the measured decay can be compared against reference rates by eye.  Pure
function of the CSV content and the options; no randomness.
"""

from __future__ import annotations

import csv
import os
import tempfile

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .study import CSV_COLUMNS

__all__ = ["SchemaError", "read_study_csv", "render_figure"]

DEFAULT_GUIDES = (-0.5, -1.5)


class SchemaError(ValueError):
    """The CSV does not conform to the study schema; names the column."""


def read_study_csv(path) -> list[dict]:
    """Parse a study CSV, validating the exact column schema."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in CSV_COLUMNS:
            if col not in header:
                raise SchemaError(f"missing required column: {col}")
        rows = []
        for row in reader:
            try:
                rows.append(
                    {
                        "method": row["method"],
                        "integrand": row["integrand"],
                        "d": int(row["d"]),
                        "n_budget": int(row["n_budget"]),
                        "n_nodes_mean": float(row["n_nodes_mean"]),
                        "mean_abs_error": float(row["mean_abs_error"]),
                        "stderr": float(row["stderr"]),
                        "estimate_mean": float(row["estimate_mean"]),
                        "seed": int(row["seed"]),
                    }
                )
            except (TypeError, ValueError) as exc:
                bad = next(
                    (c for c in CSV_COLUMNS if not _parses(row.get(c), c)),
                    "unknown",
                )
                raise SchemaError(f"unparseable value in column: {bad}") from exc
    if not rows:
        raise SchemaError("missing required column: no data rows")
    return rows


def _parses(value, column) -> bool:
    if value is None:
        return False
    try:
        if column in ("d", "n_budget", "seed"):
            int(value)
        elif column in ("n_nodes_mean", "mean_abs_error", "stderr", "estimate_mean"):
            float(value)
        return True
    except (TypeError, ValueError):
        return False


def render_figure(
    csv_paths,
    out_path,
    methods=None,
    guides=DEFAULT_GUIDES,
    title: str | None = None,
) -> str:
    """Render the log-log error figure for one or more study CSV files.

    Returns the written image path.  Guide lines are anchored at the first
    data point of the first plotted series.
    """
    if isinstance(csv_paths, (str, os.PathLike)):
        csv_paths = [csv_paths]
    rows = []
    for p in csv_paths:
        rows.extend(read_study_csv(p))
    if methods:
        rows = [r for r in rows if r["method"] in set(methods)]
        if not rows:
            raise SchemaError(f"no rows left after filtering methods {sorted(methods)}")

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    anchor = None
    seen = []
    for method in dict.fromkeys(r["method"] for r in rows):
        series = sorted(
            (r["n_budget"], r["mean_abs_error"]) for r in rows if r["method"] == method
        )
        ns = [s[0] for s in series]
        errs = [s[1] for s in series]
        ax.loglog(ns, errs, marker="o", label=method)
        seen.append(method)
        if anchor is None:
            pos = next(((n, e) for n, e in series if e > 0.0), None)
            anchor = pos

    if anchor is not None:
        n0, e0 = anchor
        n_max = max(r["n_budget"] for r in rows)
        for slope in guides:
            xs = [n0, n_max]
            ys = [e0, e0 * (n_max / n0) ** slope]
            ax.loglog(xs, ys, "--", color="gray", linewidth=0.9)
            ax.annotate(
                f"slope {slope:g}",
                xy=(xs[1], ys[1]),
                fontsize=8,
                color="gray",
                ha="left",
            )

    ax.set_xlabel("budget n (function values)")
    ax.set_ylabel("mean absolute error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()

    out_path = os.fspath(out_path)
    directory = os.path.dirname(out_path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=os.path.splitext(out_path)[1] or ".png")
    os.close(fd)
    try:
        fig.savefig(tmp, dpi=150)
        os.replace(tmp, out_path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    finally:
        plt.close(fig)
    return out_path
