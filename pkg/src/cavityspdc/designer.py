"""Inverse design of single-mode cavity-waveguide SPDC sources.

Forward direction: count modes per cluster from finesse and group-index
mismatch.  Inverse direction: find the minimum finesse that squeezes a
cluster down to one mode, solve the poling period for exact phase matching,
tune the temperature until the cluster at the target wavelength is doubly
resonant, and assemble a full device whose verification spectrum is
recomputed and checked rather than trusted from the solver's bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np
from scipy.signal import find_peaks

from . import cavity as _cavity
from . import dispersion as _dispersion
from . import spectrum as _spectrum
from .cavity import CavitySpec
from .constants import C_M_PER_S
from .dispersion import WaveguideCorrection
from .errors import (
    CoatingInfeasibleError,
    DegenerateCavityError,
    DegenerateDispersionError,
    DesignInfeasibleError,
    InfiniteFinesseError,
    NonphysicalSignalError,
    ParameterError,
    PhaseMatchingError,
    TuningNotFoundError,
    ValidityRangeError,
)
from .spectrum import Cluster, SamplingPolicy, SourceSpec

__all__ = [
    "DesignGoal",
    "DesignResult",
    "mode_count",
    "min_single_mode_finesse",
    "solve_poling_period",
    "tune_temperature",
    "solve_mirror_reflectivity",
    "design_cavity",
    "finesse_curve",
    "resolvability_check",
    "design_result_json",
]

TUNE_OBJECTIVES = ("central_cluster_present", "central_cluster_absent")

# A cluster peak above this fraction of the normalized maximum counts as
# "present"; below it, "absent".  S is normalized to 1 at perfect double
# resonance, so the decision threshold is absolute.
TUNE_DECISION_THRESHOLD = 0.5

# coincidences tried by design_cavity before declaring the goal infeasible
MAX_VERIFY_CANDIDATES = 12


def mode_count(finesse_value: float, group_index_signal: float, group_index_idler: float) -> float:
    """Expected number of modes per cluster, M = |N_s + N_i| / (2 F |N_s - N_i|).

    Real-valued by construction (a ratio of bandwidths); round up to compare
    against counted peaks.
    """
    if not finesse_value > 0:
        raise ParameterError(f"finesse must be > 0, got {finesse_value}")
    if group_index_signal == group_index_idler:
        raise DegenerateDispersionError(
            "signal and idler group indices are identical: every resonance is "
            "doubly resonant and the per-cluster mode count diverges"
        )
    return abs(group_index_signal + group_index_idler) / (
        2.0 * finesse_value * abs(group_index_signal - group_index_idler)
    )


def _group_indices_at(
    material: str,
    interaction: str,
    pump_wavelength_nm: float,
    signal_wavelength_nm: float,
    temperature_c: float,
    catalog=None,
    corrections: Mapping[str, WaveguideCorrection] | None = None,
) -> tuple[float, float]:
    cat = catalog if catalog is not None else _dispersion.builtin_catalog()
    corrections = corrections or {}
    _, pol_s, pol_i = _spectrum.interaction_polarizations(interaction)
    lam_s_um = signal_wavelength_nm * 1.0e-3
    lam_i_um = _spectrum.idler_wavelength(pump_wavelength_nm, signal_wavelength_nm) * 1.0e-3
    n_gs = _dispersion.group_index(
        cat.get(material, pol_s), lam_s_um, temperature_c, corrections.get("signal")
    )
    n_gi = _dispersion.group_index(
        cat.get(material, pol_i), lam_i_um, temperature_c, corrections.get("idler")
    )
    return n_gs, n_gi


def min_single_mode_finesse(
    material: str,
    interaction: str,
    pump_wavelength_nm: float,
    signal_wavelength_nm: float,
    temperature_c: float,
    catalog=None,
    corrections: Mapping[str, WaveguideCorrection] | None = None,
) -> float:
    """Finesse at which the cluster at this wavelength holds one mode.

    F(M=1) = |N_s + N_i| / (2 |N_s - N_i|); larger finesse gives fewer modes
    per cluster, so this is the single-mode lower bound.
    """
    n_gs, n_gi = _group_indices_at(
        material, interaction, pump_wavelength_nm, signal_wavelength_nm,
        temperature_c, catalog, corrections,
    )
    if n_gs == n_gi:
        raise DegenerateDispersionError(
            "signal and idler group indices are identical at this point; "
            "no finite finesse isolates a single mode"
        )
    return abs(n_gs + n_gi) / (2.0 * abs(n_gs - n_gi))


def solve_poling_period(
    material: str,
    interaction: str,
    pump_wavelength_nm: float,
    signal_wavelength_nm: float,
    temperature_c: float,
    catalog=None,
    corrections: Mapping[str, WaveguideCorrection] | None = None,
) -> float:
    """First-order QPM poling period (um) nulling the mismatch at the target.

    Lambda = 1 / (n_p/lp - n_s/ls - n_i/li) with wavelengths in um; an error
    if the collinear mismatch has the wrong sign for a first-order grating.
    """
    cat = catalog if catalog is not None else _dispersion.builtin_catalog()
    corrections = corrections or {}
    pol_p, pol_s, pol_i = _spectrum.interaction_polarizations(interaction)
    lam_p_um = pump_wavelength_nm * 1.0e-3
    lam_s_um = signal_wavelength_nm * 1.0e-3
    lam_i_um = _spectrum.idler_wavelength(pump_wavelength_nm, signal_wavelength_nm) * 1.0e-3
    n_p = _dispersion.refractive_index(cat.get(material, pol_p), lam_p_um, temperature_c, corrections.get("pump"))
    n_s = _dispersion.refractive_index(cat.get(material, pol_s), lam_s_um, temperature_c, corrections.get("signal"))
    n_i = _dispersion.refractive_index(cat.get(material, pol_i), lam_i_um, temperature_c, corrections.get("idler"))
    denom_per_um = n_p / lam_p_um - n_s / lam_s_um - n_i / lam_i_um
    if denom_per_um <= 0:
        raise PhaseMatchingError(
            "no first-order quasi-phase-matching: k_p - k_s - k_i is not "
            f"positive ({denom_per_um:.4g} / um) for {material} {interaction} at "
            f"{signal_wavelength_nm:g} nm"
        )
    return 1.0 / denom_per_um


def _probe_metric(
    source: SourceSpec,
    target_signal_nm: float,
    temperature_c: float,
    catalog,
    include_envelope: bool,
    probe_halfwidth_fsr: float,
    points_per_fwhm: float,
) -> float:
    """Peak S in a probe window of +-``probe_halfwidth_fsr`` signal FSRs
    around the target, at the given temperature."""
    probed = replace(source, temperature_c=temperature_c)
    (_, _), (m_s, c_s), (m_i, c_i) = probed.models(catalog)
    lam_um = target_signal_nm * 1.0e-3
    lam_i_um = _spectrum.idler_wavelength(probed.pump_wavelength_nm, target_signal_nm) * 1.0e-3
    n_gs = _dispersion.group_index(m_s, lam_um, temperature_c, c_s)
    n_gi = _dispersion.group_index(m_i, lam_i_um, temperature_c, c_i)
    figures = _cavity.mode_figures(probed.cavity, n_gs, n_gi)
    nu_t = C_M_PER_S / (target_signal_nm * 1.0e-9)
    half_hz = probe_halfwidth_fsr * figures.fsr_signal_hz
    step_hz = figures.mode_bandwidth_hz / points_per_fwhm
    n_side = int(math.ceil(half_hz / step_hz))
    nu = nu_t + np.linspace(-half_hz, half_hz, 2 * n_side + 1)
    lam_probe_nm = 1.0e9 * C_M_PER_S / nu
    s = _spectrum.joint_spectral_intensity(
        probed, lam_probe_nm, catalog, include_envelope=include_envelope
    )
    return float(np.max(s))


def _tune_scan(
    source: SourceSpec,
    target_signal_wavelength_nm: float,
    t_window_c: tuple[float, float],
    step_c: float,
    probe_halfwidth_fsr: float,
    include_envelope: bool,
    catalog,
    points_per_fwhm: float,
):
    """Shared temperature scan: returns (temps, metric per temp)."""
    lo, hi = float(t_window_c[0]), float(t_window_c[1])
    if lo > hi:
        raise ParameterError(f"temperature window must satisfy lo <= hi, got ({lo}, {hi})")
    if not step_c > 0:
        raise ParameterError(f"step_c must be > 0, got {step_c}")
    if hi == lo:
        temps = np.array([lo])
    else:
        n_steps = int(math.ceil((hi - lo) / step_c)) + 1
        temps = np.linspace(lo, hi, max(n_steps, 2))
    scores = np.array(
        [
            _probe_metric(
                source, target_signal_wavelength_nm, t, catalog,
                include_envelope, probe_halfwidth_fsr, points_per_fwhm,
            )
            for t in temps
        ]
    )
    return temps, scores


def _qualifying_temperatures(temps, scores, center: float) -> list[float]:
    """Local metric maxima above the decision threshold, best first.

    Candidates are comb-coincidence temperatures; ordering is by metric
    (descending) with near-ties (1e-9) broken toward the window center.
    """
    if len(temps) == 1:
        idx = [0] if scores[0] > TUNE_DECISION_THRESHOLD else []
    else:
        peaks, _ = find_peaks(scores, height=TUNE_DECISION_THRESHOLD)
        idx = list(peaks)
        # interior maxima only from find_peaks; admit qualifying endpoints
        if scores[0] > TUNE_DECISION_THRESHOLD and scores[0] >= scores[1]:
            idx.insert(0, 0)
        if scores[-1] > TUNE_DECISION_THRESHOLD and scores[-1] >= scores[-2]:
            idx.append(len(scores) - 1)
    ranked = sorted(
        idx,
        key=lambda i: (-round(scores[i] / 1.0e-9), abs(temps[i] - center)),
    )
    return [float(temps[i]) for i in ranked]


def tune_temperature(
    source: SourceSpec,
    target_signal_wavelength_nm: float,
    t_window_c: tuple[float, float],
    objective: str = "central_cluster_present",
    step_c: float = 0.005,
    probe_halfwidth_fsr: float = 3.0,
    include_envelope: bool = False,
    catalog=None,
    points_per_fwhm: float = 8.0,
) -> float:
    """Scan temperature until the cluster at the target is on (or off).

    The metric is the peak S within a few signal FSRs of the target; the
    envelope is excluded by default so the metric sees pure comb alignment.
    Scan step is at most ``step_c`` (0.005 C resolves the ~0.1 C on/off
    scale of a multi-cm device with margin).  Ties break toward the window
    center.  If no temperature crosses the 0.5 decision threshold in the
    right direction, the best candidate is attached to the error.
    """
    if objective not in TUNE_OBJECTIVES:
        raise ParameterError(f"objective {objective!r} not in {TUNE_OBJECTIVES}")
    temps, scores = _tune_scan(
        source, target_signal_wavelength_nm, t_window_c, step_c,
        probe_halfwidth_fsr, include_envelope, catalog, points_per_fwhm,
    )
    lo, hi = float(t_window_c[0]), float(t_window_c[1])
    want_present = objective == "central_cluster_present"
    best = float(scores.max() if want_present else scores.min())
    reached = best > TUNE_DECISION_THRESHOLD if want_present else best < TUNE_DECISION_THRESHOLD
    if not reached:
        i_best = int(np.argmax(scores) if want_present else np.argmin(scores))
        raise TuningNotFoundError(
            f"objective {objective!r} not reachable in [{lo}, {hi}] C: "
            f"best cluster peak {best:.4g} relative to the {TUNE_DECISION_THRESHOLD} "
            "decision threshold",
            best_temperature_c=float(temps[i_best]),
            best_metric=best,
        )
    candidates = np.flatnonzero(np.abs(scores - best) <= 1.0e-9)
    center = 0.5 * (lo + hi)
    i_pick = candidates[int(np.argmin(np.abs(temps[candidates] - center)))]
    return float(temps[i_pick])


def solve_mirror_reflectivity(
    target_finesse: float,
    length_cm: float,
    r1: float,
    alpha_db_cm: float,
    tol: float = 1.0e-9,
) -> float:
    """Output-mirror reflectivity R2 reaching a target finesse.

    Bisection over R2 in (0, 1); finesse is monotone in the round-trip
    factor, hence in R2.  Raises if even R2 -> 1 cannot reach the target.
    """
    if not target_finesse > 0:
        raise ParameterError(f"target finesse must be > 0, got {target_finesse}")

    def f_of(r2: float) -> float:
        try:
            return _cavity.finesse(CavitySpec(length_cm, r1, r2, alpha_db_cm))
        except DegenerateCavityError:
            return 0.0
        except InfiniteFinesseError:
            return math.inf

    f_max = f_of(1.0)
    if f_max < target_finesse:
        raise CoatingInfeasibleError(
            f"target finesse {target_finesse:.4g} unreachable: even R2 -> 1 "
            f"gives {f_max:.4g} (R1 = {r1}, alpha = {alpha_db_cm} dB/cm, "
            f"L = {length_cm} cm)"
        )
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f_of(mid) < target_finesse:
            lo = mid
        else:
            hi = mid
    return hi  # the endpoint known to meet the target


def resolvability_check(mode_bandwidth_hz: float, detector_jitter_s: float) -> bool:
    """True iff the detector jitter is strictly below the coherence time."""
    if not detector_jitter_s >= 0:
        raise ParameterError(f"jitter must be >= 0 s, got {detector_jitter_s}")
    return detector_jitter_s < _cavity.coherence_time(mode_bandwidth_hz)


def finesse_curve(
    pump_wavelength_nm: float,
    material: str,
    interaction: str,
    signal_range_nm: tuple[float, float],
    temperature_c: float,
    n_points: int,
    catalog=None,
    corrections: Mapping[str, WaveguideCorrection] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Single-mode finesse bound versus signal wavelength.

    Returns (wavelengths_nm, finesse) with NaN at points where the bound
    diverges (degenerate dispersion), emitted as gaps rather than zeros.
    """
    if n_points < 2:
        raise ParameterError(f"n_points must be >= 2, got {n_points}")
    lams = np.linspace(float(signal_range_nm[0]), float(signal_range_nm[1]), n_points)
    values = np.empty(n_points)
    for i, lam in enumerate(lams):
        try:
            values[i] = min_single_mode_finesse(
                material, interaction, pump_wavelength_nm, float(lam),
                temperature_c, catalog, corrections,
            )
        except DegenerateDispersionError:
            values[i] = np.nan
    return lams, values


@dataclass(frozen=True)
class DesignGoal:
    """Inputs to design_cavity.

    Required: material/interaction, pump and target signal wavelengths, a
    length budget, the propagation loss, and a detector jitter to judge
    resolvability.  ``pinned_length_cm``/``pinned_r2`` bypass the respective
    solver steps for devices whose geometry or coating is already fixed.
    """

    material: str
    interaction: str
    pump_wavelength_nm: float
    target_signal_wavelength_nm: float
    max_length_cm: float
    loss_alpha_db_cm: float
    r1: float = 1.0
    detector_jitter_s: float = 0.0
    finesse_safety_factor: float = 1.2
    operating_temperature_c: float = 80.0
    tune_halfwidth_c: float = 5.0
    pinned_length_cm: float | None = None
    pinned_r2: float | None = None
    max_mode_bandwidth_hz: float | None = None
    min_cluster_spacing_nm: float = 5.0
    # verification counts modes above this fraction of the spectrum peak;
    # side structure below it is treated as suppressed
    detect_threshold: float = 0.05
    corrections: Mapping[str, WaveguideCorrection] = field(default_factory=dict)

    def __post_init__(self):
        if not self.pump_wavelength_nm > 0:
            raise ParameterError("pump wavelength must be > 0 nm")
        if not self.target_signal_wavelength_nm > self.pump_wavelength_nm:
            raise ParameterError("target signal wavelength must exceed the pump wavelength")
        if not self.max_length_cm > 0:
            raise ParameterError("max length must be > 0 cm")
        if not self.loss_alpha_db_cm >= 0:
            raise ParameterError("loss must be >= 0 dB/cm")
        if not 0.0 < self.r1 <= 1.0:
            raise ParameterError(f"R1 must lie in (0, 1], got {self.r1}")
        if not self.detector_jitter_s >= 0:
            raise ParameterError("detector jitter must be >= 0 s")
        if not self.finesse_safety_factor >= 1.0:
            raise ParameterError("finesse safety factor must be >= 1")
        if self.pinned_length_cm is not None and not (
            0.0 < self.pinned_length_cm <= self.max_length_cm
        ):
            raise ParameterError("pinned length must lie in (0, max_length_cm]")
        if self.pinned_r2 is not None and not 0.0 < self.pinned_r2 < 1.0:
            raise ParameterError(f"pinned R2 must lie in (0, 1), got {self.pinned_r2}")
        if not 0.0 < self.detect_threshold < 1.0:
            raise ParameterError("detect threshold must lie in (0, 1)")
        if not self.tune_halfwidth_c >= 0:
            raise ParameterError("tune halfwidth must be >= 0 C")
        if not self.min_cluster_spacing_nm > 0:
            raise ParameterError("min cluster spacing must be > 0 nm")
        object.__setattr__(self, "corrections", dict(self.corrections))


@dataclass(frozen=True)
class DesignResult:
    """Solved device plus derived figures and the verification summary."""

    cavity: CavitySpec
    poling_period_um: float
    temperature_c: float
    finesse: float
    min_single_mode_finesse: float
    mode_count: float
    mode_bandwidth_hz: float
    mode_bandwidth_pm: float
    fsr_signal_hz: float
    fsr_idler_hz: float
    coherence_time_s: float
    p_out: float
    cluster_spacing_nm: float
    resolvable_by_detector: bool
    spectrum_summary: tuple[Cluster, ...]
    source: SourceSpec
    verification_window_nm: tuple[float, float]


def _cluster_spacing_nm(signal_wavelength_nm, length_cm, n_gs, n_gi) -> float:
    """Comb realignment period converted to signal wavelength.

    Adjacent clusters sit where the signal/idler comb offset slips by one
    full FSR: Omega_c = c / (2 L |N_s - N_i|), i.e. lambda^2/(2 L |dN|).
    """
    lam_m = signal_wavelength_nm * 1.0e-9
    return lam_m**2 / (2.0 * (length_cm * 1.0e-2) * abs(n_gs - n_gi)) * 1.0e9


def _main_lobe_window_nm(
    source: SourceSpec, target_nm: float, cluster_spacing_nm: float, catalog
) -> tuple[float, float]:
    """Signal-side interval between the first phase-matching nulls."""
    half_length_m = source.cavity.length_cm * 1.0e-2 / 2.0

    def lobe_phase(lam_nm: float) -> float:
        return abs(_spectrum.phase_mismatch(source, lam_nm, catalog)) * half_length_m

    step = max(cluster_spacing_nm / 8.0, 0.02)

    def null_on_side(direction: int) -> float:
        prev = target_nm
        for k in range(1, 20000):
            lam = target_nm + direction * k * step
            try:
                crossed = lobe_phase(lam) >= math.pi
            except (ValidityRangeError, NonphysicalSignalError):
                break  # ran into a dispersion validity edge before the null
            if crossed:
                a, b = sorted((prev, lam))
                for _ in range(60):  # bisect |dk| L/2 = pi
                    mid = 0.5 * (a + b)
                    inside = lobe_phase(mid) < math.pi
                    if direction > 0:
                        a, b = (mid, b) if inside else (a, mid)
                    else:
                        a, b = (a, mid) if inside else (mid, b)
                return 0.5 * (a + b)
            prev = lam
        return prev  # envelope never nulled: clip at the last reachable point

    lo = null_on_side(-1)
    hi = null_on_side(+1)
    return lo, hi


def design_cavity(goal: DesignGoal, catalog=None) -> DesignResult:
    """Solve a full single-mode device from a DesignGoal.

    Steps: single-mode finesse bound at the target; cavity length from the
    budget (capped so clusters stay at least ``min_cluster_spacing_nm``
    apart, floored by an optional bandwidth target, shortest length wins);
    output reflectivity from the finesse target (or pinned); poling period
    and temperature tuned for a doubly resonant cluster at the target; then
    verification by recomputing the spectrum over the phase-matching main
    lobe and requiring every cluster there to hold exactly one mode.

    When no temperature in the window yields a doubly resonant cluster, the
    unpinned length is nudged in sub-percent steps (still within the
    budget, the spacing cap and the bandwidth floor) and the tune/verify
    stage is repeated; the nudges also serve as retries when a coincidence
    exists but its side clusters fail single-mode verification.
    """
    t0 = goal.operating_temperature_c
    lam_target = goal.target_signal_wavelength_nm

    # 1. single-mode bound at the operating point
    f_m1 = min_single_mode_finesse(
        goal.material, goal.interaction, goal.pump_wavelength_nm, lam_target,
        t0, catalog, goal.corrections,
    )
    f_target = goal.finesse_safety_factor * f_m1
    n_gs, n_gi = _group_indices_at(
        goal.material, goal.interaction, goal.pump_wavelength_nm, lam_target,
        t0, catalog, goal.corrections,
    )

    pols = _spectrum.interaction_polarizations(goal.interaction)
    cat = catalog if catalog is not None else _dispersion.builtin_catalog()
    tunable = any(cat.get(goal.material, pol).temperature_dependent for pol in pols[1:])

    # 2. cavity length ladder.  Base length from the budget, capped so that
    # clusters stay at least min_cluster_spacing_nm apart, floored by an
    # optional bandwidth target.  The comb alignment at the target is set by
    # the optical length, so a ladder of nudges off the base length (all
    # still within every cap) is kept in reserve for when the temperature
    # window alone cannot produce a doubly resonant cluster.  For
    # temperature-independent materials such as KTP the nudge is the only
    # alignment knob, and the alignment is periodic in length with the
    # vernier period lam_pump / (2 N_s); stepping through one full period in
    # sixteenths guarantees a capture.
    if goal.pinned_length_cm is not None:
        lengths = [goal.pinned_length_cm]
    else:
        # cap and floor use the worst-case group indices over the scan
        # window so both promises survive wherever the tuner lands
        dn_worst = abs(n_gs - n_gi)
        recip_worst = 1.0 / n_gs + 1.0 / n_gi
        if tunable:
            for t_edge in (t0 - goal.tune_halfwidth_c, t0 + goal.tune_halfwidth_c):
                try:
                    gs, gi = _group_indices_at(
                        goal.material, goal.interaction, goal.pump_wavelength_nm,
                        lam_target, t_edge, catalog, goal.corrections,
                    )
                except (ValidityRangeError, DegenerateDispersionError):
                    continue
                dn_worst = max(dn_worst, abs(gs - gi))
                recip_worst = max(recip_worst, 1.0 / gs + 1.0 / gi)
        lam_m = lam_target * 1.0e-9
        cap_cluster_cm = (
            lam_m**2 / (2.0 * dn_worst * goal.min_cluster_spacing_nm * 1.0e-9)
        ) * 1.0e2
        length0_cm = min(goal.max_length_cm, cap_cluster_cm)
        nudge_floor_cm = 0.0
        if goal.max_mode_bandwidth_hz is not None:
            # shortest length whose linewidth meets the bandwidth target
            # anywhere in the scan window
            floor_cm = (
                C_M_PER_S * recip_worst
                / (4.0 * f_target * goal.max_mode_bandwidth_hz)
            ) * 1.0e2
            if floor_cm > length0_cm:
                raise DesignInfeasibleError(
                    f"bandwidth target {goal.max_mode_bandwidth_hz:.4g} Hz needs "
                    f"L >= {floor_cm:.4g} cm, above the usable maximum "
                    f"{length0_cm:.4g} cm (length budget / cluster-spacing cap)"
                )
            nudge_floor_cm = floor_cm
        # a binding bandwidth floor flips the ladder: linewidth improves
        # with length, so walk upward from the floor toward the cap instead
        # of downward from the cap
        if tunable:
            n_trims = 9
        else:
            dl_vernier_cm = goal.pump_wavelength_nm * 1.0e-9 / (2.0 * n_gs) * 1.0e2
            n_trims = 18
        base = nudge_floor_cm if nudge_floor_cm > 0.0 else length0_cm
        sign = 1.0 if nudge_floor_cm > 0.0 else -1.0
        step_cm = 0.002 * base if tunable else dl_vernier_cm / 16.0
        trims = (base + sign * k * step_cm for k in range(n_trims))
        lengths = [
            el for el in trims if 0.0 < el <= length0_cm * (1.0 + 1.0e-12)
        ] or [base]

    # the grating period never moves the comb, only the envelope, so it is
    # shared across the ladder and re-solved per tuned temperature below
    period0 = solve_poling_period(
        goal.material, goal.interaction, goal.pump_wavelength_nm, lam_target,
        t0, catalog, goal.corrections,
    )
    t_window = (t0 - goal.tune_halfwidth_c, t0 + goal.tune_halfwidth_c)

    coating_error: CoatingInfeasibleError | None = None
    tune_error: TuningNotFoundError | None = None
    first_failure: DesignInfeasibleError | None = None
    verified = None
    for length_cm in lengths:
        # 3. output mirror for this length
        if goal.pinned_r2 is not None:
            r2 = goal.pinned_r2
        else:
            try:
                r2 = solve_mirror_reflectivity(
                    f_target, length_cm, goal.r1, goal.loss_alpha_db_cm
                )
            except CoatingInfeasibleError as exc:
                if coating_error is None:
                    coating_error = exc
                continue
        cav = CavitySpec(length_cm, goal.r1, r2, goal.loss_alpha_db_cm)
        f_actual = _cavity.finesse(cav)
        if f_actual < f_target * (1.0 - 1.0e-9):
            if first_failure is None:
                first_failure = DesignInfeasibleError(
                    f"finesse {f_actual:.4g} falls short of the safety target "
                    f"{f_target:.4g} (= {goal.finesse_safety_factor} x {f_m1:.4g})"
                )
            continue

        # 4. temperature scan.  Every metric maximum in the window is a
        # usable comb coincidence; they differ in side-cluster structure,
        # so each one is verified (step 5) until one passes.
        source0 = SourceSpec(
            material=goal.material,
            interaction=goal.interaction,
            pump_wavelength_nm=goal.pump_wavelength_nm,
            poling_period_um=period0,
            temperature_c=t0,
            cavity=cav,
            corrections=goal.corrections,
        )
        scan_window = t_window if tunable else (t0, t0)
        temps, scores = _tune_scan(
            source0, lam_target, scan_window, 0.005, 3.0, False, catalog, 8.0,
        )
        candidates = _qualifying_temperatures(
            temps, scores, 0.5 * (scan_window[0] + scan_window[1])
        )
        if not candidates:
            if tune_error is None:
                i_best = int(np.argmax(scores))
                tune_error = TuningNotFoundError(
                    f"no doubly resonant cluster at {lam_target} nm within "
                    f"[{scan_window[0]:.4g}, {scan_window[1]:.4g}] C: best "
                    f"cluster peak {scores[i_best]:.4g} below the "
                    f"{TUNE_DECISION_THRESHOLD} decision threshold",
                    best_temperature_c=float(temps[i_best]),
                    best_metric=float(scores[i_best]),
                )
            continue

        # 5. verification spectrum over the phase-matching main lobe
        for t_star in candidates[:MAX_VERIFY_CANDIDATES]:
            # re-solve the grating at the candidate temperature (recenters
            # the envelope; tooth alignment is untouched)
            period = solve_poling_period(
                goal.material, goal.interaction, goal.pump_wavelength_nm,
                lam_target, t_star, catalog, goal.corrections,
            )
            source = replace(source0, poling_period_um=period, temperature_c=t_star)
            n_gs, n_gi = _group_indices_at(
                goal.material, goal.interaction, goal.pump_wavelength_nm,
                lam_target, t_star, catalog, goal.corrections,
            )
            spacing_nm = _cluster_spacing_nm(lam_target, length_cm, n_gs, n_gi)
            window = _main_lobe_window_nm(source, lam_target, spacing_nm, catalog)
            spec = _spectrum.compute_spectrum(source, window, SamplingPolicy(), catalog)
            modes = _spectrum.detect_modes(spec, goal.detect_threshold)
            clusters = _spectrum.group_clusters(modes, source, catalog)
            failure = None
            if not clusters:
                failure = DesignInfeasibleError(
                    "verification spectrum shows no cluster above the detection threshold"
                )
            else:
                for cluster in clusters:
                    if len(cluster.modes) != 1:
                        failure = DesignInfeasibleError(
                            f"cluster at {cluster.center_nm:.3f} nm holds "
                            f"{len(cluster.modes)} modes; single-mode "
                            f"verification failed (L = {length_cm:.4f} cm, "
                            f"T = {t_star:.3f} C)",
                            cluster=cluster,
                        )
                        break
            if failure is None:
                verified = (
                    cav, t_star, period, source, n_gs, n_gi, spacing_nm, window, clusters,
                )
                break
            if first_failure is None:
                first_failure = failure  # best-aligned candidate's defect
        if verified is not None:
            break
    if verified is None:
        for err in (first_failure, tune_error, coating_error):
            if err is not None:
                raise err
        raise DesignInfeasibleError("no usable cavity length in the ladder")
    cav, t_star, period, source, n_gs, n_gi, spacing_nm, window, clusters = verified

    # 6. figures of merit
    figures = _cavity.mode_figures(cav, n_gs, n_gi)
    lam_m = lam_target * 1.0e-9
    bandwidth_pm = figures.mode_bandwidth_hz * lam_m**2 / C_M_PER_S * 1.0e12
    return DesignResult(
        cavity=cav,
        poling_period_um=period,
        temperature_c=t_star,
        finesse=figures.finesse,
        min_single_mode_finesse=f_m1,
        mode_count=mode_count(figures.finesse, n_gs, n_gi),
        mode_bandwidth_hz=figures.mode_bandwidth_hz,
        mode_bandwidth_pm=bandwidth_pm,
        fsr_signal_hz=figures.fsr_signal_hz,
        fsr_idler_hz=figures.fsr_idler_hz,
        coherence_time_s=figures.coherence_time_s,
        p_out=_cavity.pair_emission_probability(cav),
        cluster_spacing_nm=spacing_nm,
        resolvable_by_detector=resolvability_check(
            figures.mode_bandwidth_hz, goal.detector_jitter_s
        ),
        spectrum_summary=tuple(clusters),
        source=source,
        verification_window_nm=(float(window[0]), float(window[1])),
    )


def design_result_json(result: DesignResult) -> dict:
    """JSON-ready dict with explicit units in the field names."""
    return {
        "length_cm": result.cavity.length_cm,
        "r1": result.cavity.r1,
        "r2": result.cavity.r2,
        "alpha_db_cm": result.cavity.alpha_db_cm,
        "poling_period_um": result.poling_period_um,
        "temperature_c": result.temperature_c,
        "finesse": result.finesse,
        "m_min_finesse": result.min_single_mode_finesse,
        "mode_count": result.mode_count,
        "mode_bandwidth_mhz": result.mode_bandwidth_hz / 1.0e6,
        "mode_bandwidth_pm": result.mode_bandwidth_pm,
        "fsr_signal_ghz": result.fsr_signal_hz / 1.0e9,
        "fsr_idler_ghz": result.fsr_idler_hz / 1.0e9,
        "coherence_time_ns": result.coherence_time_s * 1.0e9,
        "p_out": result.p_out,
        "cluster_spacing_nm": result.cluster_spacing_nm,
        "resolvable": result.resolvable_by_detector,
        "verification_window_nm": list(result.verification_window_nm),
        "clusters": _spectrum.cluster_report(result.spectrum_summary),
    }
