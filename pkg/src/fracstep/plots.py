"""Figure rendering for the report-producing CLI subcommands.

Each function writes one matplotlib figure to a file next to the
delimited output. The Agg backend is forced so rendering works headless.
"""

from __future__ import annotations

import math


def _axes():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    return fig, ax


def _save(fig, path: str) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    import matplotlib.pyplot as plt

    plt.close(fig)


def save_curve_figure(samples, alpha, path: str) -> None:
    """Symbol curve in the complex plane with the sector boundary rays."""
    fig, ax = _axes()
    re = [s.value.real for s in samples]
    im = [s.value.imag for s in samples]
    ax.plot(re, im, ".", ms=3, label="symbol curve")
    half = alpha.alpha * math.pi / 2.0
    rmax = max(abs(s.value) for s in samples) * 1.1
    for sign in (+1, -1):
        ax.plot(
            [0.0, rmax * math.cos(sign * half)],
            [0.0, rmax * math.sin(sign * half)],
            "k--",
            lw=1,
        )
    ax.axhline(0.0, color="0.8", lw=0.5)
    ax.axvline(0.0, color="0.8", lw=0.5)
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.set_title(f"symbol curve, order {alpha.alpha}")
    ax.legend(loc="best")
    _save(fig, path)


def save_convergence_figure(table, path: str) -> None:
    """Error ladder on log-log axes with a first-order reference line."""
    fig, ax = _axes()
    taus = [t for t, _ in table.rows]
    errs = [e for _, e in table.rows]
    ax.loglog(taus, errs, "o-", label="error")
    ref = [errs[0] * t / taus[0] for t in taus]
    ax.loglog(taus, ref, "k--", lw=1, label="order 1")
    ax.set_xlabel("tau")
    ax.set_ylabel("error")
    ax.set_title("convergence ladder")
    ax.legend(loc="best")
    _save(fig, path)


def save_sweep_figure(report, path: str) -> None:
    """Regularity ratios against the step size."""
    fig, ax = _axes()
    taus = [t for t, _, _ in report.rows]
    ratios = [r for _, _, r in report.rows]
    ax.semilogx(taus, ratios, "o-")
    ax.set_xlabel("tau")
    ax.set_ylabel("ratio")
    ax.set_title(
        f"{report.scheme.value}, p = {report.p}, uniformity = {report.uniformity:.3f}"
    )
    _save(fig, path)


def save_decay_figure(times, au_norms, fit, path: str) -> None:
    """Decay of ||A u^n|| with the fitted slope."""
    fig, ax = _axes()
    ax.loglog(times, au_norms, ".", ms=3, label="||A u^n||")
    t0, y0 = times[len(times) // 2], au_norms[len(au_norms) // 2]
    ref = [y0 * (t / t0) ** fit.slope for t in times]
    ax.loglog(times, ref, "k--", lw=1, label=f"slope {fit.slope:.3f}")
    ax.set_xlabel("t")
    ax.set_ylabel("norm")
    ax.set_title("decay study")
    ax.legend(loc="best")
    _save(fig, path)
