"""PNG figures for the command line reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_RC = {
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "figure.dpi": 120,
}

# fixed metadata keeps the PNG bytes identical between runs
_META = {"Software": None}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, metadata=_META)
    plt.close(fig)


def growth_figure(points, exponent: float, path, title: str = "", size_label: str = "|D|"):
    """|c| / size^exponent against size on log axes."""
    pts = sorted((float(s), abs(float(v))) for s, v in points if s > 0 and v)
    with plt.rc_context(_RC):
        fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(8, 3.2))
        if pts:
            xs = [s for s, _ in pts]
            ax0.loglog(xs, [v for _, v in pts], ".", ms=2, color="tab:blue")
            ref = pts[len(pts) // 2]
            ax0.loglog(xs, [ref[1] * (s / ref[0]) ** exponent for s in xs], "-", lw=0.8, color="tab:red",
                       label=f"slope {exponent:g}")
            ax0.legend(frameon=False)
            ax1.semilogx(xs, [v / s**exponent for s, v in pts], ".", ms=2, color="tab:green")
        ax0.set_xlabel(size_label)
        ax0.set_ylabel("|coefficient|")
        ax1.set_xlabel(size_label)
        ax1.set_ylabel(f"|coefficient| / {size_label}^{exponent:g}")
        if title:
            fig.suptitle(title)
        _save(fig, path)


def line_integral_figure(rows, path):
    """log |I(v, c)| against c, one curve per v; rows are (v, c, value)."""
    by_v = {}
    for v, c, val in rows:
        by_v.setdefault(v, []).append((c, abs(val)))
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.5, 3.2))
        for v in sorted(by_v):
            pts = sorted(by_v[v])
            ax.semilogy([c for c, _ in pts], [a for _, a in pts], "o-", ms=3, lw=0.8, label=f"v = {v}")
        ax.set_xlabel("c")
        ax.set_ylabel("|I(v, c)|")
        ax.legend(frameon=False, fontsize=7)
        _save(fig, path)


def arch_figure(rows, path):
    """|integral component| against t on a log scale; rows are (t, v, value, predicted)."""
    by_v = {}
    for t, v, val, pred in rows:
        by_v.setdefault(v, []).append((t, abs(val), abs(pred)))
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.5, 3.2))
        for v in sorted(by_v):
            pts = sorted(by_v[v])
            line, = ax.semilogy([t for t, _, _ in pts], [a for _, a, _ in pts], "o", ms=3, label=f"v = {v}")
            ax.semilogy([t for t, _, _ in pts], [p for _, _, p in pts], "--", lw=0.8, color=line.get_color())
        ax.set_xlabel("t")
        ax.set_ylabel("|component|  (dashed: closed form)")
        ax.legend(frameon=False, fontsize=7)
        _save(fig, path)


def lift_figure(table, path):
    """|Lambda[B]| against Q(B) for the stored pairs."""
    pts = [(b.q(), v) for b, v in table.entries.items() if v and b.q() > 0]
    exponent = (table.weight + 1) / 2
    growth_figure(pts, exponent, path, title=table.name or "lift", size_label="Q")

