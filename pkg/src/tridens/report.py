"""Writing experiment results: delimited data files and optional figures."""
import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .experiments import METRICS, ExperimentResult

LOG_METRICS = ("dk", "dk_empirical", "ks", "ks_coupled", "rate")


def _columns(rows) -> list:
    cols = []
    for row in rows:
        for key in row:
            if key not in cols:
                cols.append(key)
    # timing last so data columns line up across experiments
    if "wall_time" in cols:
        cols.remove("wall_time")
        cols.append("wall_time")
    return cols


def _plain(value):
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    return value


def to_csv(result: ExperimentResult) -> str:
    """CSV with a header row; RFC 4180 quoting and CRLF line ends; empty cells for missing values."""
    rows = result.rows()
    cols = _columns(rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(cols)
    for row in rows:
        out = []
        for c in cols:
            v = _plain(row.get(c))
            out.append("" if v is None else repr(v) if isinstance(v, float) else v)
        writer.writerow(out)
    return buf.getvalue()


def to_json(result: ExperimentResult) -> str:
    """JSON array of flat records; non-finite floats become the strings "inf", "-inf", "nan"."""
    rows = result.rows()
    cols = _columns(rows)
    out = []
    for row in rows:
        rec = {}
        for c in cols:
            v = _plain(row.get(c))
            if isinstance(v, float) and not math.isfinite(v):
                v = repr(v)
            rec[c] = v
        out.append(rec)
    return json.dumps(out, indent=1) + "\n"


def write_result(result: ExperimentResult, path, fmt: str = "csv") -> Path:
    path = Path(path)
    text = to_csv(result) if fmt == "csv" else to_json(result)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def plot_result(result: ExperimentResult, path) -> Path:
    """Median (with 10-90% band) of each metric against the grid variable, saved as an image."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    if result.experiment == "concentration":
        fig, ax = plt.subplots(figsize=(6, 4))
        rows = result.records
        idx = np.arange(len(rows))
        ax.semilogy(idx, [max(r["bound"], 1e-300) for r in rows], "o-", label="bound")
        ax.semilogy(idx, [max(r["empirical"], 1e-300) for r in rows], "s", label="empirical")
        ax.set_xticks(idx)
        ax.set_xticklabels([f"{r['a']:.0e},{r['b']:.0e},{r['eps']}" for r in rows], rotation=60, fontsize=7)
        ax.set_ylabel("P(|X - EX| > eps)")
        ax.legend()
    else:
        metrics = METRICS[result.experiment]
        fig, axes = plt.subplots(1, len(metrics), figsize=(4 * len(metrics), 3.5), squeeze=False)
        xkey = "N" if result.experiment == "findim" else "n"
        for ax, m in zip(axes[0], metrics):
            series = {}
            for r in result.summary:
                series.setdefault(r["stat"], []).append((r[xkey], r[m]))
            x, med = zip(*series["median"])
            _, lo = zip(*series["q10"])
            _, hi = zip(*series["q90"])
            ax.plot(x, med, "o-")
            ax.fill_between(x, lo, hi, alpha=0.25)
            ax.set_xscale("log")
            if m in LOG_METRICS and all(v > 0 for v in lo):
                ax.set_yscale("log")
            ax.set_xlabel(xkey)
            ax.set_title(m)
    fig.suptitle(result.experiment)
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
