"""SVG line plots of closed-loop results: output against reference, tracking error, input and disturbance."""

from pathlib import Path

import matplotlib  # type: ignore

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # type: ignore  # noqa: E402  # pylint: disable=wrong-import-position

from kdpc.experiments.runner import ExperimentResult  # noqa: E402  # pylint: disable=wrong-import-position
from kdpc.utils.io import PathLike  # noqa: E402  # pylint: disable=wrong-import-position

# Fixed salt and no date so identical results render to identical files.
_SVG_RC = {"svg.hashsalt": "kdpc", "svg.fonttype": "none"}


def plot_result(result: ExperimentResult, path: PathLike) -> Path:
    """Render a result with one panel per signal and one line per controller."""
    path = Path(path)
    with plt.rc_context(_SVG_RC):
        fig, axes = plt.subplots(4, 1, figsize=(8, 10), sharex=True)
        reference_drawn = False
        for name, series in sorted(result.series.items()):
            t = series.array("t")
            if not reference_drawn:
                axes[0].plot(t, series.array("y_ref"), "k--", label="reference")
                axes[3].plot(t, series.array("d"), "k", label="disturbance")
                reference_drawn = True
            axes[0].plot(t, series.array("y"), label=name)
            axes[1].plot(t, series.error, label=name)
            axes[2].plot(t, series.array("u"), label=name)

        axes[0].set_ylabel("output y")
        axes[1].set_ylabel("error y - y_ref")
        axes[2].set_ylabel("input u")
        axes[3].set_ylabel("disturbance d")
        axes[3].set_xlabel("time [s]")
        axes[0].set_title(result.scenario.name)
        for ax in axes:
            ax.grid(True)
            ax.legend(loc="best")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path
