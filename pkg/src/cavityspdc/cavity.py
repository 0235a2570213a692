"""Fabry-Perot physics of a mirror-coated waveguide.

Round-trip factor, finesse, Airy transmission, free spectral range, mode
bandwidth, pair-emission probability, coherence time, and the loss
inversion used to back propagation loss out of a measured finesse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import C_M_PER_S
from .errors import (
    DegenerateCavityError,
    InfiniteFinesseError,
    ParameterError,
    SingularCoefficientError,
)

__all__ = [
    "CavitySpec",
    "ModeFigures",
    "round_trip_factor",
    "finesse",
    "resonance_phase",
    "airy_transmission",
    "airy_minimum",
    "airy_partial_sum",
    "free_spectral_range",
    "mode_bandwidth",
    "pair_emission_probability",
    "coherence_time",
    "solve_loss_from_finesse",
    "mode_figures",
    "MIN_ROUND_TRIP_FACTOR",
]

# Below this round-trip factor the finesse expression leaves its domain
# (arcsin argument > 1): the "cavity" stores less than one meaningful pass
# and has no resonant comb.  Equals (sqrt(2)-1)^4, where finesse = 1.
MIN_ROUND_TRIP_FACTOR = (math.sqrt(2.0) - 1.0) ** 4


@dataclass(frozen=True)
class CavitySpec:
    """Mirror reflectivities, length and propagation loss of the cavity."""

    length_cm: float
    r1: float
    r2: float
    alpha_db_cm: float = 0.0

    def __post_init__(self):
        if not self.length_cm > 0:
            raise ParameterError(f"cavity length must be > 0 cm, got {self.length_cm}")
        for name, r in (("R1", self.r1), ("R2", self.r2)):
            if not 0.0 <= r <= 1.0:
                raise ParameterError(f"reflectivity {name} must lie in [0, 1], got {r}")
        if not self.alpha_db_cm >= 0:
            raise ParameterError(f"loss must be >= 0 dB/cm, got {self.alpha_db_cm}")


@dataclass(frozen=True)
class ModeFigures:
    """Per-device comb figures: FSRs, finesse, bandwidth, coherence time."""

    fsr_signal_hz: float
    fsr_idler_hz: float
    finesse: float
    mode_bandwidth_hz: float
    coherence_time_s: float


def round_trip_factor(spec: CavitySpec) -> float:
    """Fraction of power surviving one round trip (path 2L through the loss)."""
    return spec.r1 * spec.r2 * 10.0 ** (-2.0 * spec.alpha_db_cm * spec.length_cm / 10.0)


def finesse(spec: CavitySpec) -> float:
    """Cavity finesse from reflectivities and loss.

    F = pi / (2 asin((1 - rho^(1/2)) / (2 rho^(1/4)))).  This is the standard
    Fabry-Perot orientation (FSR over linewidth); it reproduces 116.2 for the
    reference device (L = 0.1 cm, R1 = 1, R2 = 0.95, alpha = 0.06 dB/cm).
    """
    rho = round_trip_factor(spec)
    if rho <= 0.0:
        raise DegenerateCavityError(
            "round-trip factor is 0 (a mirror is fully transparent or loss is total)"
        )
    if rho >= 1.0:
        raise InfiniteFinesseError(
            "round-trip factor is 1 (lossless, perfectly mirrored): finesse diverges"
        )
    arg = (1.0 - math.sqrt(rho)) / (2.0 * rho**0.25)
    if arg > 1.0:
        raise DegenerateCavityError(
            f"round-trip factor {rho:.4g} below {MIN_ROUND_TRIP_FACTOR:.4g}: "
            "too lossy to form a resonant comb (finesse < 1)"
        )
    return math.pi / (2.0 * math.asin(arg))


def resonance_phase(wavelength_um, n_eff, length_cm):
    """Single-pass phase phi = 2 pi L n_eff / lambda (L converted to um)."""
    lam = np.asarray(wavelength_um, dtype=float)
    if np.any(lam <= 0):
        raise ParameterError("wavelength must be > 0")
    if not length_cm > 0:
        raise ParameterError("length must be > 0 cm")
    phi = 2.0 * np.pi * (length_cm * 1.0e4) * np.asarray(n_eff, dtype=float) / lam
    return float(phi) if phi.ndim == 0 else phi


def _airy_coefficient(spec: CavitySpec) -> float:
    # The sharpness coefficient uses the full round-trip factor, loss
    # included, so the closed form is exactly the infinite-round-trip limit
    # of airy_partial_sum for lossy cavities too (and the linewidth it
    # implies is consistent with finesse()).  For alpha = 0 it reduces to
    # the familiar 4 sqrt(R1 R2)/(1 - sqrt(R1 R2))^2.
    rho = round_trip_factor(spec)
    if rho >= 1.0:
        raise SingularCoefficientError(
            "round-trip factor is 1: Airy sharpness coefficient diverges"
        )
    sq = math.sqrt(rho)
    return 4.0 * sq / (1.0 - sq) ** 2


def airy_transmission(spec: CavitySpec, phi):
    """Normalized Airy lineshape A(phi) = [1 + K sin^2(phi)]^(-1), peak 1."""
    k = _airy_coefficient(spec)
    phi = np.asarray(phi, dtype=float)
    a = 1.0 / (1.0 + k * np.sin(phi) ** 2)
    return float(a) if a.ndim == 0 else a


def airy_minimum(spec: CavitySpec) -> float:
    """Anti-resonant floor A_min = (1 + K)^(-1) at phi = (m + 1/2) pi."""
    return 1.0 / (1.0 + _airy_coefficient(spec))


def airy_partial_sum(spec: CavitySpec, phi, n_roundtrips: int):
    """Airy lineshape built from finitely many round trips.

    |sum_{n=0}^{N} (r e^{2 i phi})^n|^2 scaled by (1 - r)^2 with
    r = sqrt(round-trip factor), so the N -> infinity limit equals
    airy_transmission.  Serves as the convergence oracle for the closed form.
    """
    if n_roundtrips < 1:
        raise ParameterError(f"n_roundtrips must be >= 1, got {n_roundtrips}")
    rho = round_trip_factor(spec)
    if rho >= 1.0:
        raise SingularCoefficientError(
            "round-trip factor is 1: normalized partial sum has no limit"
        )
    r = math.sqrt(rho)
    phi = np.asarray(phi, dtype=float)
    z = r * np.exp(2.0j * phi)
    total = (1.0 - z ** (n_roundtrips + 1)) / (1.0 - z)
    a = (np.abs(total) * (1.0 - r)) ** 2
    return float(a) if a.ndim == 0 else a


def free_spectral_range(length_cm: float, group_index: float) -> float:
    """FSR = c / (2 N L) in hertz."""
    if not length_cm > 0:
        raise ParameterError(f"length must be > 0 cm, got {length_cm}")
    if not group_index >= 1.0:
        raise ParameterError(f"group index must be >= 1, got {group_index}")
    return C_M_PER_S / (2.0 * group_index * length_cm * 1.0e-2)


def mode_bandwidth(fsr_signal_hz: float, fsr_idler_hz: float, finesse_value: float) -> float:
    """Mean signal/idler linewidth: (FSR_i + FSR_s) / (2 F)."""
    if not finesse_value > 0:
        raise ParameterError(f"finesse must be > 0, got {finesse_value}")
    return (fsr_signal_hz + fsr_idler_hz) / (2.0 * finesse_value)


def pair_emission_probability(spec: CavitySpec) -> float:
    """Probability that a generated pair leaves through the output mirror.

    p_out = 10^(-(alpha/2) L / 10) (1 - R2) / (1 - rho).  The single-pass
    attenuation in the numerator uses half the cavity length (pairs are
    taken to be generated at the waveguide center); the denominator uses the
    full round-trip factor rho = R1 R2 10^(-2 alpha L / 10).
    """
    rho = round_trip_factor(spec)
    denom = 1.0 - rho
    if denom <= 0.0:
        raise DegenerateCavityError(
            "round-trip factor >= 1: emission probability denominator is not positive"
        )
    single_pass_half = 10.0 ** (-(spec.alpha_db_cm / 2.0) * spec.length_cm / 10.0)
    return single_pass_half * (1.0 - spec.r2) / denom


def coherence_time(mode_bandwidth_hz: float) -> float:
    """Photon coherence time tau_c = 1 / (pi delta-nu)."""
    if not mode_bandwidth_hz > 0:
        raise ParameterError(f"mode bandwidth must be > 0 Hz, got {mode_bandwidth_hz}")
    return 1.0 / (math.pi * mode_bandwidth_hz)


def solve_loss_from_finesse(
    measured_finesse: float,
    length_cm: float,
    r1: float,
    r2: float,
    alpha_max_db_cm: float = 10.0,
    rel_tol: float = 1.0e-6,
) -> float:
    """Invert the finesse relation for propagation loss.

    Bisection on alpha in [0, alpha_max]; finesse is strictly decreasing in
    alpha, so the bracket is monotone.  Returns alpha in dB/cm.
    """
    if not measured_finesse > 0:
        raise ParameterError(f"measured finesse must be > 0, got {measured_finesse}")

    def f_of(alpha: float) -> float:
        return finesse(CavitySpec(length_cm, r1, r2, alpha))

    lossless = f_of(0.0)
    if measured_finesse > lossless:
        raise ParameterError(
            f"measured finesse {measured_finesse:g} exceeds the lossless bound "
            f"{lossless:g} for R1={r1}, R2={r2}"
        )
    try:
        floor = f_of(alpha_max_db_cm)
    except DegenerateCavityError:
        floor = 0.0
    if measured_finesse < floor:
        raise ParameterError(
            f"measured finesse {measured_finesse:g} below the value at "
            f"alpha = {alpha_max_db_cm} dB/cm; widen alpha_max_db_cm"
        )
    lo, hi = 0.0, alpha_max_db_cm  # f_of(lo) >= target >= f_of(hi)
    while hi - lo > rel_tol * max(hi, 1.0e-30):
        mid = 0.5 * (lo + hi)
        try:
            f_mid = f_of(mid)
        except DegenerateCavityError:
            f_mid = 0.0
        if f_mid >= measured_finesse:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1.0e-15:  # floating-point floor regardless of rel_tol
            break
    return 0.5 * (lo + hi)


def mode_figures(spec: CavitySpec, group_index_signal: float, group_index_idler: float) -> ModeFigures:
    """Assemble the comb figures for one device.

    The finesse is taken equal for signal and idler (one mirror coating
    covers both wavelengths in the degenerate-band devices modeled here).
    """
    f = finesse(spec)
    fsr_s = free_spectral_range(spec.length_cm, group_index_signal)
    fsr_i = free_spectral_range(spec.length_cm, group_index_idler)
    dnu = mode_bandwidth(fsr_s, fsr_i, f)
    return ModeFigures(
        fsr_signal_hz=fsr_s,
        fsr_idler_hz=fsr_i,
        finesse=f,
        mode_bandwidth_hz=dnu,
        coherence_time_s=coherence_time(dnu),
    )
