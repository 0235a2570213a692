"""Joint spectral intensity sampling, mode detection, clustering, export.

The end-to-end fixture is the short monolithic device (L=0.1 cm, R1=1,
R2=0.95, alpha=0.06 dB/cm) pumped at 780 nm with the poling period and
temperature its designer settles on; its cluster structure below is frozen
from a verified run.
"""

import math

import numpy as np
import pytest

from cavityspdc import (
    C_M_PER_S,
    CavitySpec,
    ModePeak,
    NonphysicalSignalError,
    SamplingBudgetError,
    SamplingPolicy,
    SourceSpec,
    compute_spectrum,
    convolve_resolution,
    detect_modes,
    group_clusters,
    idler_wavelength,
    interaction_polarizations,
    joint_spectral_intensity,
    phase_mismatch,
    phasematch_envelope,
    spectrum_csv_text,
)
from cavityspdc.dispersion import builtin_catalog, group_index
from cavityspdc.errors import ParameterError, ResolutionError
from cavityspdc.spectrum import CSV_HEADER, SampledSpectrum, cluster_report

CAV = CavitySpec(length_cm=0.1, r1=1.0, r2=0.95, alpha_db_cm=0.06)
# operating point found by the designer for a clean 1560 nm signal mode
PERIOD_UM = 144.31703969372734
T_OP = 81.46
WINDOW = (1530.0534976631593, 1591.7484148041904)   # phase-matching main lobe


def make_source(temperature_c=T_OP, period_um=PERIOD_UM, interaction="eoe"):
    return SourceSpec(
        material="PPLN",
        interaction=interaction,
        pump_wavelength_nm=780.0,
        poling_period_um=period_um,
        temperature_c=temperature_c,
        cavity=CAV,
    )


def test_interaction_aliases():
    assert interaction_polarizations("eee") == ("e", "e", "e")
    assert interaction_polarizations("Type-0") == ("e", "e", "e")
    assert interaction_polarizations("typeII") == ("e", "o", "e")
    assert interaction_polarizations("type2") == ("e", "o", "e")
    with pytest.raises(ParameterError):
        interaction_polarizations("type1")
    # SourceSpec normalizes the alias to polarization labels
    assert make_source(interaction="type-ii").interaction == "eoe"


def test_idler_wavelength():
    assert idler_wavelength(780.0, 1550.0) == pytest.approx(1570.1298701298701, rel=1e-14)
    # degenerate pair
    assert idler_wavelength(780.0, 1560.0) == pytest.approx(1560.0, rel=1e-14)
    # unit-agnostic
    assert idler_wavelength(0.78, 1.55) == pytest.approx(1.5701298701298701, rel=1e-14)
    arr = idler_wavelength(780.0, np.array([1500.0, 1560.0, 1620.0]))
    assert arr.shape == (3,)
    with pytest.raises(NonphysicalSignalError):
        idler_wavelength(780.0, 779.0)
    with pytest.raises(NonphysicalSignalError):
        idler_wavelength(780.0, 780.0)


def test_energy_conservation_identity():
    rng = np.random.default_rng(3)
    lam_p = 780.0
    lam_s = rng.uniform(781.0, 3000.0, 500)
    lam_i = idler_wavelength(lam_p, lam_s)
    resid = np.abs(1.0 / lam_s + 1.0 / lam_i - 1.0 / lam_p) * lam_p
    assert np.max(resid) < 1e-12


def test_phase_mismatch_zero_at_matched_period():
    src = make_source()
    dk = phase_mismatch(src, 1560.0)
    # period was solved at 1560 nm: residual far below one envelope width
    assert abs(dk) * (CAV.length_cm * 1.0e-2) / 2.0 < 1e-3
    # detuning from the matched period moves dk away from zero
    src_detuned = make_source(period_um=PERIOD_UM * 1.01)
    assert abs(phase_mismatch(src_detuned, 1560.0)) > abs(dk)


def test_phasematch_envelope_shape():
    assert phasematch_envelope(0.0, 0.1) == 1.0
    # first null at dk L / 2 = pi
    length_cm = 0.1
    dk_null = 2.0 * math.pi / (length_cm * 1.0e-2)
    assert phasematch_envelope(dk_null, length_cm) == pytest.approx(0.0, abs=1e-30)
    half = phasematch_envelope(dk_null / 2.0, length_cm)
    assert half == pytest.approx((math.sin(math.pi / 2) / (math.pi / 2)) ** 2, rel=1e-12)
    arr = phasematch_envelope(np.linspace(-dk_null, dk_null, 11), length_cm)
    assert arr.shape == (11,)
    assert np.all(arr <= 1.0)


def test_grid_uniform_in_frequency():
    src = make_source()
    spec = compute_spectrum(src, (1559.0, 1561.0))
    lam = spec.wavelengths_nm
    assert np.all(np.diff(lam) > 0)
    assert lam[0] == pytest.approx(1559.0, rel=1e-12)
    assert lam[-1] == pytest.approx(1561.0, rel=1e-12)
    nu = C_M_PER_S / (lam * 1.0e-9)
    steps = np.diff(nu)
    assert np.max(np.abs(steps - steps[0])) < 1e-6 * abs(steps[0])
    # policy: at least points_per_fwhm samples per mode FWHM (580 MHz here)
    assert abs(steps[0]) < 580.02e6 / 8.0 * 1.0000001


def test_values_factorize():
    src = make_source()
    spec = compute_spectrum(src, (1559.5, 1560.5))
    assert np.array_equal(spec.values, spec.airy_signal * spec.airy_idler * spec.phasematch)
    assert np.max(spec.values) <= 1.0 + 1e-12
    bare = compute_spectrum(src, (1559.5, 1560.5), include_envelope=False)
    assert np.all(bare.phasematch == 1.0)
    assert np.all(bare.values >= spec.values - 1e-15)


def test_scalar_jsi_matches_grid():
    src = make_source()
    spec = compute_spectrum(src, (1559.9, 1560.1))
    for k in (0, len(spec) // 2, len(spec) - 1):
        lam = float(spec.wavelengths_nm[k])
        assert joint_spectral_intensity(src, lam) == pytest.approx(
            float(spec.values[k]), rel=1e-12)


def test_threads_do_not_change_results():
    src = make_source()
    one = compute_spectrum(src, (1555.0, 1565.0), n_threads=1)
    four = compute_spectrum(src, (1555.0, 1565.0), n_threads=4)
    assert np.array_equal(one.values, four.values)
    assert np.array_equal(one.wavelengths_nm, four.wavelengths_nm)


def test_sampling_budget_error():
    src = make_source()
    with pytest.raises(SamplingBudgetError) as exc:
        compute_spectrum(src, WINDOW, policy=SamplingPolicy(max_points=100))
    assert exc.value.required_points > exc.value.max_points == 100


def test_window_validation():
    src = make_source()
    with pytest.raises(ParameterError):
        compute_spectrum(src, (1561.0, 1559.0))
    with pytest.raises(NonphysicalSignalError):
        compute_spectrum(src, (700.0, 1561.0))
    with pytest.raises(ParameterError):
        SamplingPolicy(points_per_fwhm=0.5)
    with pytest.raises(ParameterError):
        SamplingPolicy(max_points=1)


def test_single_resonance_detection_and_width():
    # isolate the central tooth: S is the product of two aligned Airy lines,
    # so its FWHM is the per-arm bandwidth (4.71 pm here) narrowed by the
    # two-Lorentzian product factor sqrt(sqrt(2)-1) ~ 0.6436
    src = make_source()
    spec = compute_spectrum(src, (1560.80, 1560.90), include_envelope=False)
    modes = detect_modes(spec, 0.5)
    assert len(modes) == 1
    grid_step_nm = float(np.max(np.diff(spec.wavelengths_nm)))
    assert abs(modes[0].center_nm - 1560.8509) < 2.0 * grid_step_nm + 1e-4
    product_fwhm_pm = 4.708 * math.sqrt(math.sqrt(2.0) - 1.0)
    assert modes[0].fwhm_nm * 1e3 == pytest.approx(product_fwhm_pm, rel=0.05)
    # signal and idler teeth are tuned to coincide but not perfectly
    assert modes[0].height == pytest.approx(1.0, abs=0.02)


def _synthetic(lam, values):
    src = make_source()
    return SampledSpectrum(
        wavelengths_nm=np.asarray(lam, dtype=float),
        values=np.asarray(values, dtype=float),
        airy_signal=None, airy_idler=None, phasematch=None,
        source=src, policy=SamplingPolicy(), window_nm=(float(lam[0]), float(lam[-1])),
        include_envelope=False,
    )


def test_detect_threshold_is_relative_to_global_max():
    lam = np.linspace(1550.0, 1552.0, 2001)
    values = (np.exp(-0.5 * ((lam - 1550.5) / 0.01) ** 2)
              + 0.05 * np.exp(-0.5 * ((lam - 1551.5) / 0.01) ** 2))
    spec = _synthetic(lam, values)
    assert len(detect_modes(spec, 0.1)) == 1
    assert len(detect_modes(spec, 0.02)) == 2
    heights = [m.height for m in detect_modes(spec, 0.02)]
    assert heights[0] == pytest.approx(1.0, abs=1e-6)
    assert heights[1] == pytest.approx(0.05, abs=1e-4)


def test_detect_parabolic_refinement_beats_grid():
    lam = np.linspace(1550.0, 1551.0, 401)     # 2.5 pm grid
    true_center = 1550.5081
    values = np.exp(-0.5 * ((lam - true_center) / 0.02) ** 2)
    spec = _synthetic(lam, values)
    (mode,) = detect_modes(spec, 0.5)
    grid_step = lam[1] - lam[0]
    assert abs(mode.center_nm - true_center) < grid_step / 10.0
    sigma = 0.02
    assert mode.fwhm_nm == pytest.approx(2.0 * math.sqrt(2.0 * math.log(2.0)) * sigma, rel=0.01)


def test_detect_edge_cases():
    lam = np.linspace(1550.0, 1551.0, 101)
    assert detect_modes(_synthetic(lam, np.zeros(101)), 0.1) == []
    assert detect_modes(_synthetic(lam[:2], np.ones(2)), 0.1) == []
    # flat-topped peak resolves to a single mode
    plateau = np.zeros(101)
    plateau[48:53] = 1.0
    modes = detect_modes(_synthetic(lam, plateau), 0.1)
    assert len(modes) == 1
    assert 1550.47 < modes[0].center_nm < 1550.53
    with pytest.raises(ParameterError):
        detect_modes(_synthetic(lam, plateau), 0.0)
    with pytest.raises(ParameterError):
        detect_modes(_synthetic(lam, plateau), 1.0)


def test_group_clusters_gap_rule():
    src = make_source()
    cat = builtin_catalog()
    n_g = group_index(cat.get("ppln", "e"), 1.560, T_OP)
    fsr_lam_nm = (1.560e-6) ** 2 / (2.0 * n_g * CAV.length_cm * 1e-2) * 1e9
    base = 1560.0
    peaks = [
        ModePeak(center_nm=base, height=1.0, fwhm_nm=0.005),
        ModePeak(center_nm=base + 1.9 * fsr_lam_nm, height=0.5, fwhm_nm=0.005),
        ModePeak(center_nm=base + 1.9 * fsr_lam_nm + 5.0 * fsr_lam_nm, height=0.8, fwhm_nm=0.005),
    ]
    clusters = group_clusters(peaks, src)
    assert [len(c.modes) for c in clusters] == [2, 1]
    # intensity-weighted center of the first cluster
    w = np.array([1.0, 0.5])
    pos = np.array([peaks[0].center_nm, peaks[1].center_nm])
    assert clusters[0].center_nm == pytest.approx(float(np.sum(w * pos) / np.sum(w)), rel=1e-12)
    assert clusters[0].span_nm == pytest.approx(pos[1] - pos[0], rel=1e-12)
    assert clusters[1].span_nm == 0.0
    assert group_clusters([], src) == []
    with pytest.raises(ParameterError):
        group_clusters(list(reversed(peaks)), src)


def test_worked_device_cluster_structure():
    # frozen from a verified run at the operating point
    src = make_source()
    spec = compute_spectrum(src, WINDOW)
    assert len(spec) == 104751
    assert float(np.max(spec.values)) == pytest.approx(0.9949953308932736, rel=1e-9)

    strict = group_clusters(detect_modes(spec, 0.1), src)
    assert [(round(c.center_nm, 3), len(c.modes)) for c in strict] == [
        (1560.851, 1), (1576.616, 1)]

    deep = group_clusters(detect_modes(spec, 0.02), src)
    assert [len(c.modes) for c in deep] == [4, 1, 1]
    centers = [c.center_nm for c in deep]
    assert centers[0] == pytest.approx(1545.6242, abs=1e-3)
    assert centers[1] == pytest.approx(1560.8509, abs=1e-3)
    assert centers[2] == pytest.approx(1576.6164, abs=1e-3)
    spacings = np.diff(centers)
    assert spacings[0] == pytest.approx(15.2267, abs=0.01)
    assert spacings[1] == pytest.approx(15.7655, abs=0.01)

    report = cluster_report(deep)
    assert len(report) == 3
    assert len(report[1]["modes"]) == 1
    assert report[1]["modes"][0]["fwhm_pm"] < 5.0


def test_convolution_preserves_integral_and_drops_factors():
    src = make_source()
    spec = compute_spectrum(src, (1560.0, 1561.5))
    out = convolve_resolution(spec, 0.02)
    assert out.airy_signal is None and out.airy_idler is None and out.phasematch is None
    before = np.trapezoid(spec.values, spec.wavelengths_nm)
    after = np.trapezoid(out.values, out.wavelengths_nm)
    assert after == pytest.approx(before, rel=1e-12)
    # a kernel much wider than a tooth flattens the comb contrast
    assert np.max(out.values) < 0.6 * np.max(spec.values)
    assert np.min(out.values) > np.min(spec.values)
    with pytest.raises(ResolutionError):
        convolve_resolution(spec, 1e-5)
    with pytest.raises(ParameterError):
        convolve_resolution(spec, -0.1)


def test_csv_export():
    src = make_source()
    spec = compute_spectrum(src, (1560.0, 1560.2))
    text = spectrum_csv_text(spec)
    lines = text.strip().split("\n")
    assert lines[0] == CSV_HEADER == "lambda_s_nm,lambda_i_nm,airy_s,airy_i,phasematch,S"
    assert len(lines) == len(spec) + 1
    first = [float(x) for x in lines[1].split(",")]
    assert first[0] == spec.wavelengths_nm[0]
    assert first[1] == idler_wavelength(780.0, spec.wavelengths_nm[0])
    assert first[2] == spec.airy_signal[0]
    assert first[5] == spec.values[0]
    # energy conservation holds for every exported row
    cols = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    resid = np.abs(1.0 / cols[:, 0] + 1.0 / cols[:, 1] - 1.0 / 780.0) * 780.0
    assert np.max(resid) < 1e-12
    # smoothed spectra export NaN factor columns
    out = convolve_resolution(compute_spectrum(src, (1560.0, 1561.5)), 0.02)
    line1 = spectrum_csv_text(out).strip().split("\n")[1]
    assert line1.split(",")[2] == "nan"
