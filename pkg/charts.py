"""
Chart module for the newton-osc toolkit
Handles log-log plots of oscillatory decay and of zeta functions near a pole
"""
import logging
from typing import Optional, Sequence, Tuple

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from numeric_harness import FitResult

logger = logging.getLogger('newton_osc.charts')


class ChartManager:
    """Class to draw the numeric harness results as PNG files"""

    @staticmethod
    def _finish(fig, ax, label: str, path: str) -> None:
        ax.grid(True, which="both", alpha=0.4)
        ax.legend(loc="best")

        # Add watermark
        ax.text(
            0.5, 0.5, label,
            fontsize=40, color='gray', alpha=0.2,
            ha='center', va='center', transform=ax.transAxes, fontweight='bold'
        )
        fig.savefig(path, format='png', bbox_inches='tight')
        plt.close(fig)
        logger.info(f"🖼️ Chart written to {path}")

    @classmethod
    def decay_chart(cls, samples: Sequence[Tuple[float, complex]], fit: Optional[FitResult], label: str,
                    path: str) -> None:
        """|I(t)| against t on log-log axes with the fitted power law"""
        fig, ax = plt.subplots(figsize=(6, 5))
        t = np.array([p[0] for p in samples], dtype=float)
        values = np.abs(np.array([p[1] for p in samples], dtype=complex))
        ax.loglog(t, values, 'o', color='blue', label="|I(t)|")
        if fit is not None:
            curve = abs(fit.coefficient) * t ** fit.exponent * np.log(t) ** (fit.log_power or 0)
            ax.loglog(t, curve, '-', color='green' if not fit.poor else 'red',
                      label=f"fit: t^{fit.exponent:.3f}")
        ax.set_xlabel("t")
        ax.set_ylabel("|I(t)|")
        cls._finish(fig, ax, label, path)

    @classmethod
    def pole_chart(cls, samples: Sequence[Tuple[float, float]], pole: float, fit: Optional[FitResult], label: str,
                   path: str) -> None:
        """|Z(s)| against s - s* on log-log axes with the fitted pole term"""
        fig, ax = plt.subplots(figsize=(6, 5))
        delta = np.array([p[0] for p in samples], dtype=float) - pole
        values = np.abs(np.array([p[1] for p in samples], dtype=float))
        ax.loglog(delta, values, 'o', color='blue', label="|Z(s)|")
        if fit is not None and fit.log_power:
            curve = abs(fit.coefficient) * delta ** (-fit.log_power)
            ax.loglog(delta, curve, '-', color='green' if not fit.poor else 'red',
                      label=f"fit: order {fit.log_power}")
        ax.set_xlabel(f"s - ({pole:.4g})")
        ax.set_ylabel("|Z(s)|")
        cls._finish(fig, ax, label, path)
