"""SVG figure emission for spectra and parameter sweeps.

Figures are rendered straight through the SVG canvas (no pyplot state) with
a fixed hash salt and no embedded date, so identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import io
from typing import Sequence

import matplotlib
import numpy as np
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure

from .errors import ParameterError
from .spectrum import SampledSpectrum

__all__ = ["spectrum_svg_bytes", "series_svg_bytes"]

_LOG_FLOOR = 1.0e-8


def _render(fig: Figure) -> bytes:
    buf = io.BytesIO()
    FigureCanvasSVG(fig)
    with matplotlib.rc_context({"svg.hashsalt": "cavityspdc"}):
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def spectrum_svg_bytes(
    spectrum: SampledSpectrum,
    log_scale: bool = False,
    title: str | None = None,
    overlay: SampledSpectrum | None = None,
) -> bytes:
    """Joint spectral intensity versus signal wavelength.

    The phase-matching envelope, when recorded, is drawn dashed on top.
    ``overlay`` adds a second spectrum on the same grid (e.g. a
    resolution-convolved copy).
    """
    if len(spectrum) == 0:
        raise ParameterError("cannot plot an empty spectrum")
    fig = Figure(figsize=(9.0, 4.5))
    ax = fig.add_subplot(111)
    lam = spectrum.wavelengths_nm
    vals = np.maximum(spectrum.values, _LOG_FLOOR) if log_scale else spectrum.values
    ax.plot(lam, vals, lw=0.7, color="midnightblue", label="S")
    if spectrum.phasematch is not None and spectrum.include_envelope:
        env = np.maximum(spectrum.phasematch, _LOG_FLOOR) if log_scale else spectrum.phasematch
        ax.plot(lam, env, "r--", lw=1.0, alpha=0.6, label="phase-matching envelope")
    if overlay is not None:
        ovals = np.maximum(overlay.values, _LOG_FLOOR) if log_scale else overlay.values
        ax.plot(overlay.wavelengths_nm, ovals, lw=1.2, color="darkorange", label="convolved")
    if log_scale:
        ax.set_yscale("log")
    ax.set_xlabel("signal wavelength (nm)")
    ax.set_ylabel("normalized intensity")
    if title:
        ax.set_title(title)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    return _render(fig)


def series_svg_bytes(
    series: Sequence[tuple[np.ndarray, np.ndarray, str]],
    xlabel: str,
    ylabel: str,
    log_scale: bool = False,
    title: str | None = None,
) -> bytes:
    """One or more labeled (x, y) curves; NaN samples appear as gaps."""
    if not series or all(len(x) == 0 for x, _, _ in series):
        raise ParameterError("cannot plot an empty series")
    fig = Figure(figsize=(7.0, 4.5))
    ax = fig.add_subplot(111)
    for x, y, label in series:
        ax.plot(x, y, lw=1.2, label=label)
    if log_scale:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if any(label for _, _, label in series):
        ax.legend(fontsize=8)
    fig.tight_layout()
    return _render(fig)
