"""Design and simulation of doubly resonant cavity-waveguide SPDC sources.

The package models photon-pair generation in a periodically poled nonlinear
waveguide terminated by mirror coatings.  Both down-converted fields resonate
in the same Fabry-Perot cavity, so the emitted spectrum is the phase-matching
envelope carved by two slightly detuned mode combs: a clustered comb whose
geometry (mode spacing, cluster spacing, number of modes per cluster) follows
from the material dispersion and the cavity figures.

Main entry points:

* :mod:`cavityspdc.dispersion` -- Sellmeier material catalog (PPLN, PPKTP)
* :mod:`cavityspdc.cavity` -- Fabry-Perot figures of merit
* :mod:`cavityspdc.spectrum` -- sampled joint spectral intensity, mode and
  cluster detection, instrument-resolution convolution
* :mod:`cavityspdc.designer` -- inverse design of a single-mode source
* :mod:`cavityspdc.cli` -- ``cavityspdc`` console command
"""

from .cavity import (
    CavitySpec,
    ModeFigures,
    airy_minimum,
    airy_partial_sum,
    airy_transmission,
    coherence_time,
    finesse,
    free_spectral_range,
    mode_bandwidth,
    mode_figures,
    pair_emission_probability,
    resonance_phase,
    round_trip_factor,
    solve_loss_from_finesse,
)
from .constants import C_M_PER_S
from .designer import (
    DesignGoal,
    DesignResult,
    design_cavity,
    design_result_json,
    finesse_curve,
    min_single_mode_finesse,
    mode_count,
    resolvability_check,
    solve_mirror_reflectivity,
    solve_poling_period,
    tune_temperature,
)
from .dispersion import (
    DispersionModel,
    MaterialCatalog,
    WaveguideCorrection,
    builtin_catalog,
    group_index,
    load_material_catalog,
    refractive_index,
)
from .errors import (
    CatalogConflictError,
    CatalogError,
    CoatingInfeasibleError,
    DegenerateCavityError,
    DegenerateDispersionError,
    DesignInfeasibleError,
    DomainError,
    InfiniteFinesseError,
    NonphysicalSignalError,
    ParameterError,
    PhaseMatchingError,
    ResolutionError,
    SamplingBudgetError,
    SingularCoefficientError,
    TuningNotFoundError,
    ValidityRangeError,
)
from .spectrum import (
    Cluster,
    ModePeak,
    SampledSpectrum,
    SamplingPolicy,
    SourceSpec,
    cluster_report,
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

__version__ = "0.1.0"

__all__ = [
    "C_M_PER_S",
    "CatalogConflictError",
    "CatalogError",
    "CavitySpec",
    "Cluster",
    "CoatingInfeasibleError",
    "DegenerateCavityError",
    "DegenerateDispersionError",
    "DesignGoal",
    "DesignInfeasibleError",
    "DesignResult",
    "DispersionModel",
    "DomainError",
    "InfiniteFinesseError",
    "MaterialCatalog",
    "ModeFigures",
    "ModePeak",
    "NonphysicalSignalError",
    "ParameterError",
    "PhaseMatchingError",
    "ResolutionError",
    "SampledSpectrum",
    "SamplingBudgetError",
    "SamplingPolicy",
    "SingularCoefficientError",
    "SourceSpec",
    "TuningNotFoundError",
    "ValidityRangeError",
    "WaveguideCorrection",
    "airy_minimum",
    "airy_partial_sum",
    "airy_transmission",
    "builtin_catalog",
    "cluster_report",
    "coherence_time",
    "compute_spectrum",
    "convolve_resolution",
    "design_cavity",
    "design_result_json",
    "detect_modes",
    "finesse",
    "finesse_curve",
    "free_spectral_range",
    "group_clusters",
    "group_index",
    "idler_wavelength",
    "interaction_polarizations",
    "joint_spectral_intensity",
    "load_material_catalog",
    "min_single_mode_finesse",
    "mode_bandwidth",
    "mode_count",
    "mode_figures",
    "pair_emission_probability",
    "phase_mismatch",
    "phasematch_envelope",
    "refractive_index",
    "resolvability_check",
    "resonance_phase",
    "round_trip_factor",
    "solve_loss_from_finesse",
    "solve_mirror_reflectivity",
    "solve_poling_period",
    "spectrum_csv_text",
    "tune_temperature",
]
