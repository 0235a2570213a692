"""Sellmeier dispersion models for the supported nonlinear materials.

Refractive and group indices as functions of wavelength and temperature.
Coefficients are not hardcoded: they live in a JSON catalog (one shipped
with the package, overridable from a user file) so the physics stays
auditable and swappable.  Built-in entries:

* congruent LiNbO3, extraordinary axis -- Jundt, Opt. Lett. 22, 1553 (1997)
* congruent LiNbO3, ordinary axis -- Edwards & Lawrence, Opt. Quantum
  Electron. 16, 373 (1984)
* KTP, y and z axes -- Bierlein & Vanherzeele, JOSA B 6, 622 (1989)
  (room-temperature fit, treated as temperature independent)

Every model carries an explicit validity window; evaluation outside it is
an error, never a silent extrapolation.  Waveguide dispersion can be layered
on top either as coefficient overrides or as an additive polynomial index
offset (bulk coefficients alone will not reproduce a real waveguide's
effective index; callers with measured waveguide data supply it here).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping

import numpy as np

from .errors import (
    CatalogConflictError,
    CatalogError,
    ParameterError,
    ValidityRangeError,
)

__all__ = [
    "DispersionModel",
    "WaveguideCorrection",
    "MaterialCatalog",
    "refractive_index",
    "group_index",
    "load_material_catalog",
    "builtin_catalog",
    "FORM_COEFFICIENTS",
]

# Coefficient names each functional form requires, nothing more or less.
FORM_COEFFICIENTS = {
    # n^2 = a1 + b1 f + (a2 + b2 f)/(L^2 - (a3 + b3 f)^2)
    #          + (a4 + b4 f)/(L^2 - a5^2) - a6 L^2,  f = (T - t_ref)(T + t_off)
    "two_pole_tdep": frozenset(
        {"a1", "a2", "a3", "a4", "a5", "a6", "b1", "b2", "b3", "b4", "t_ref", "t_off"}
    ),
    # n^2 = a1 + (a2 + b2 f)/(L^2 - (a3 + b3 f)^2) - a6 L^2
    "one_pole_tdep": frozenset({"a1", "a2", "a3", "a6", "b2", "b3", "t_ref", "t_off"}),
    # n^2 = a1 + a2/(L^2 - a3sq) - a6 L^2  (no temperature dependence)
    "one_pole": frozenset({"a1", "a2", "a3sq", "a6"}),
    # n = const (test/reference model; zero dispersion by construction)
    "constant": frozenset({"n"}),
}

_TEMPERATURE_INDEPENDENT_FORMS = {"one_pole", "constant"}

# Materials whose catalog axes are not literally named e/o.  KTP is biaxial;
# for propagation along x the z axis plays the extraordinary role and y the
# ordinary one, which is how the eee/eoe interaction labels map onto it.
_EO_AXIS_ALIASES = {
    "ppktp": {"e": "z", "o": "y"},
    "ktp": {"e": "z", "o": "y"},
}

_AXIS_SYNONYMS = {"ordinary": "o", "extraordinary": "e"}


@dataclass(frozen=True)
class DispersionModel:
    """One material/axis Sellmeier fit with its validity window.

    ``coefficients`` must contain exactly the names declared for ``form``
    in ``FORM_COEFFICIENTS``.
    """

    material: str
    axis: str
    form: str
    coefficients: Mapping[str, float]
    wavelength_range_um: tuple[float, float]
    temperature_range_c: tuple[float, float]
    citation: str = ""

    def __post_init__(self):
        if self.form not in FORM_COEFFICIENTS:
            raise CatalogError(
                f"unknown dispersion form {self.form!r}; "
                f"expected one of {sorted(FORM_COEFFICIENTS)}"
            )
        required = FORM_COEFFICIENTS[self.form]
        got = set(self.coefficients)
        unknown = got - required
        missing = required - got
        if unknown:
            raise CatalogError(
                f"{self.material}/{self.axis}: coefficient(s) {sorted(unknown)} "
                f"not part of form {self.form!r}"
            )
        if missing:
            raise CatalogError(
                f"{self.material}/{self.axis}: form {self.form!r} is missing "
                f"coefficient(s) {sorted(missing)}"
            )
        for name, rng in (
            ("wavelength_range_um", self.wavelength_range_um),
            ("temperature_range_c", self.temperature_range_c),
        ):
            if len(rng) != 2 or not (float(rng[0]) < float(rng[1])):
                raise CatalogError(
                    f"{self.material}/{self.axis}: {name} must be [lo, hi] with lo < hi"
                )
        object.__setattr__(self, "wavelength_range_um", tuple(map(float, self.wavelength_range_um)))
        object.__setattr__(self, "temperature_range_c", tuple(map(float, self.temperature_range_c)))
        object.__setattr__(self, "coefficients", dict(self.coefficients))

    @property
    def temperature_dependent(self) -> bool:
        return self.form not in _TEMPERATURE_INDEPENDENT_FORMS

    def key(self) -> tuple[str, str]:
        return (self.material.lower(), self.axis.lower())


@dataclass(frozen=True)
class WaveguideCorrection:
    """Adaptation of a bulk model to a waveguide's effective index.

    mode = "none": bulk dispersion identically.
    mode = "coefficient_overrides": replace named Sellmeier coefficients.
    mode = "additive_index_offset": add dn(L) = sum_k c_k L^k (L in um),
    coefficients ascending in power.
    """

    mode: str = "none"
    coefficient_overrides: Mapping[str, float] = field(default_factory=dict)
    index_offset_poly_um: tuple[float, ...] = ()

    def __post_init__(self):
        modes = {"none", "coefficient_overrides", "additive_index_offset"}
        if self.mode not in modes:
            raise ParameterError(f"correction mode {self.mode!r} not in {sorted(modes)}")
        if self.mode == "coefficient_overrides" and not self.coefficient_overrides:
            raise ParameterError("coefficient_overrides mode needs a nonempty mapping")
        if self.mode == "additive_index_offset" and len(self.index_offset_poly_um) == 0:
            raise ParameterError("additive_index_offset mode needs polynomial coefficients")
        object.__setattr__(self, "coefficient_overrides", dict(self.coefficient_overrides))
        object.__setattr__(
            self, "index_offset_poly_um", tuple(float(c) for c in self.index_offset_poly_um)
        )


NO_CORRECTION = WaveguideCorrection()


def _first_offender(arr: np.ndarray, lo: float, hi: float) -> float:
    bad = arr[(arr < lo) | (arr > hi)]
    return float(bad.flat[0])


def _check_range(model: DispersionModel, wavelength_um, temperature_c, pad_um=0.0):
    lam = np.asarray(wavelength_um, dtype=float)
    lo, hi = model.wavelength_range_um
    if np.any(lam - pad_um < lo) or np.any(lam + pad_um > hi):
        detail = " (derivative stencil needs a neighborhood)" if np.any(np.asarray(pad_um) > 0) else ""
        raise ValidityRangeError(
            f"wavelength {_first_offender(lam, lo + pad_um, hi - pad_um):g} um outside "
            f"[{lo:g}, {hi:g}] um for {model.material}/{model.axis}{detail}"
        )
    tem = np.asarray(temperature_c, dtype=float)
    tlo, thi = model.temperature_range_c
    if np.any(tem < tlo) or np.any(tem > thi):
        raise ValidityRangeError(
            f"temperature {_first_offender(tem, tlo, thi):g} C outside "
            f"[{tlo:g}, {thi:g}] C for {model.material}/{model.axis}"
        )


def _n_squared(form: str, c: Mapping[str, float], lam, f):
    lam2 = lam * lam
    if form == "two_pole_tdep":
        pole1 = (c["a2"] + c["b2"] * f) / (lam2 - (c["a3"] + c["b3"] * f) ** 2)
        pole2 = (c["a4"] + c["b4"] * f) / (lam2 - c["a5"] ** 2)
        return c["a1"] + c["b1"] * f + pole1 + pole2 - c["a6"] * lam2
    if form == "one_pole_tdep":
        pole = (c["a2"] + c["b2"] * f) / (lam2 - (c["a3"] + c["b3"] * f) ** 2)
        return c["a1"] + pole - c["a6"] * lam2
    if form == "one_pole":
        return c["a1"] + c["a2"] / (lam2 - c["a3sq"]) - c["a6"] * lam2
    raise CatalogError(f"form {form!r} has no closed-form n^2")  # pragma: no cover


def _evaluate(model: DispersionModel, lam, temperature_c):
    coeff = model.coefficients
    if model.form == "constant":
        return np.broadcast_to(np.float64(coeff["n"]), np.shape(lam)).copy() if np.ndim(lam) else float(coeff["n"])
    if model.temperature_dependent:
        t = np.asarray(temperature_c, dtype=float)
        f = (t - coeff["t_ref"]) * (t + coeff["t_off"])
    else:
        f = 0.0
    return np.sqrt(_n_squared(model.form, coeff, lam, f))


def _with_overrides(model: DispersionModel, overrides: Mapping[str, float]) -> DispersionModel:
    allowed = FORM_COEFFICIENTS[model.form]
    unknown = set(overrides) - allowed
    if unknown:
        raise CatalogError(
            f"{model.material}/{model.axis}: override coefficient(s) {sorted(unknown)} "
            f"not part of form {model.form!r}"
        )
    merged = dict(model.coefficients)
    merged.update({k: float(v) for k, v in overrides.items()})
    return DispersionModel(
        material=model.material,
        axis=model.axis,
        form=model.form,
        coefficients=merged,
        wavelength_range_um=model.wavelength_range_um,
        temperature_range_c=model.temperature_range_c,
        citation=model.citation + " (with waveguide coefficient overrides)",
    )


def refractive_index(
    model: DispersionModel,
    wavelength_um,
    temperature_c,
    correction: WaveguideCorrection | None = None,
):
    """Effective refractive index n(lambda, T).

    ``wavelength_um`` may be a scalar or an array; arrays evaluate
    elementwise.  Out-of-range inputs raise ValidityRangeError.
    """
    correction = correction or NO_CORRECTION
    if correction.mode == "coefficient_overrides":
        model = _with_overrides(model, correction.coefficient_overrides)
    _check_range(model, wavelength_um, temperature_c)
    lam = np.asarray(wavelength_um, dtype=float)
    n = _evaluate(model, lam, temperature_c)
    if correction.mode == "additive_index_offset":
        n = n + np.polynomial.polynomial.polyval(lam, correction.index_offset_poly_um)
    if np.ndim(wavelength_um) == 0 and np.ndim(temperature_c) == 0:
        return float(n)
    return n


# Relative step for the central difference in group_index.  Validated against
# a half-step Richardson refinement in the test suite (agreement ~1e-12,
# comfortably under the 1e-9 gate).
_GROUP_INDEX_REL_STEP = 1e-5


def group_index(
    model: DispersionModel,
    wavelength_um,
    temperature_c,
    correction: WaveguideCorrection | None = None,
):
    """Group index N = n - lambda * dn/dlambda.

    The derivative is a central difference with relative step 1e-5, one code
    path for every functional form (including corrections, whose offsets are
    differentiated the same way).  The wavelength must sit strictly inside
    the validity window so the stencil fits.
    """
    correction = correction or NO_CORRECTION
    eff_model = model
    if correction.mode == "coefficient_overrides":
        eff_model = _with_overrides(model, correction.coefficient_overrides)
    lam = np.asarray(wavelength_um, dtype=float)
    h = lam * _GROUP_INDEX_REL_STEP
    _check_range(eff_model, lam, temperature_c, pad_um=h)

    def n_of(lmbda):
        n = _evaluate(eff_model, lmbda, temperature_c)
        if correction.mode == "additive_index_offset":
            n = n + np.polynomial.polynomial.polyval(lmbda, correction.index_offset_poly_um)
        return n

    dn_dlam = (n_of(lam + h) - n_of(lam - h)) / (2.0 * h)
    ng = n_of(lam) - lam * dn_dlam
    if np.ndim(wavelength_um) == 0 and np.ndim(temperature_c) == 0:
        return float(ng)
    return ng


class MaterialCatalog:
    """Immutable map from (material, axis) to a DispersionModel.

    Lookup is case-insensitive and understands the e/o polarization labels
    for materials whose physical axes carry other names (KTP y/z).
    """

    def __init__(self, models):
        entries: dict[tuple[str, str], DispersionModel] = {}
        for model in models:
            key = model.key()
            if key in entries:
                raise CatalogConflictError(
                    f"duplicate catalog entry for material {key[0]!r} axis {key[1]!r}"
                )
            entries[key] = model
        self._entries = entries

    @property
    def entries(self) -> Mapping[tuple[str, str], DispersionModel]:
        return dict(self._entries)

    def __len__(self):
        return len(self._entries)

    def __contains__(self, key) -> bool:
        try:
            self.get(*key)
            return True
        except CatalogError:
            return False

    def get(self, material: str, axis: str) -> DispersionModel:
        mat = material.lower()
        ax = axis.lower()
        ax = _AXIS_SYNONYMS.get(ax, ax)
        direct = self._entries.get((mat, ax))
        if direct is not None:
            return direct
        alias = _EO_AXIS_ALIASES.get(mat, {}).get(ax)
        if alias is not None and (mat, alias) in self._entries:
            return self._entries[(mat, alias)]
        known = sorted({m for m, _ in self._entries})
        raise CatalogError(
            f"no catalog entry for material {material!r} axis {axis!r}; "
            f"known materials: {known}"
        )

    def merged_with(self, models) -> "MaterialCatalog":
        """New catalog where ``models`` override same-key entries here."""
        merged = dict(self._entries)
        incoming: dict[tuple[str, str], DispersionModel] = {}
        for model in models:
            key = model.key()
            if key in incoming:
                raise CatalogConflictError(
                    f"duplicate catalog entry for material {key[0]!r} axis {key[1]!r}"
                )
            incoming[key] = model
        merged.update(incoming)
        return MaterialCatalog(merged.values())


_ENTRY_FIELDS = {
    "material",
    "axis",
    "form",
    "coefficients",
    "wavelength_range_um",
    "temperature_range_c",
    "citation",
}


def _parse_entry(index: int, raw) -> DispersionModel:
    if not isinstance(raw, dict):
        raise CatalogError(f"catalog entry {index}: expected an object, got {type(raw).__name__}")
    unknown = set(raw) - _ENTRY_FIELDS
    if unknown:
        raise CatalogError(f"catalog entry {index}: unknown field(s) {sorted(unknown)}")
    missing = (_ENTRY_FIELDS - {"citation"}) - set(raw)
    if missing:
        raise CatalogError(f"catalog entry {index}: missing field(s) {sorted(missing)}")
    coeffs = raw["coefficients"]
    if not isinstance(coeffs, dict) or not all(
        isinstance(v, (int, float)) for v in coeffs.values()
    ):
        raise CatalogError(f"catalog entry {index}: 'coefficients' must map names to numbers")
    try:
        return DispersionModel(
            material=str(raw["material"]),
            axis=str(raw["axis"]),
            form=str(raw["form"]),
            coefficients={k: float(v) for k, v in coeffs.items()},
            wavelength_range_um=tuple(raw["wavelength_range_um"]),
            temperature_range_c=tuple(raw["temperature_range_c"]),
            citation=str(raw.get("citation", "")),
        )
    except CatalogError as exc:
        raise CatalogError(f"catalog entry {index}: {exc}") from exc


def _parse_catalog_text(text: str, origin: str) -> list[DispersionModel]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"{origin}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, list):
        raise CatalogError(f"{origin}: top level must be an array of entries")
    return [_parse_entry(i, entry) for i, entry in enumerate(doc)]


_BUILTIN: MaterialCatalog | None = None


def builtin_catalog() -> MaterialCatalog:
    """Catalog shipped with the package (PPLN e/o, PPKTP y/z)."""
    global _BUILTIN
    if _BUILTIN is None:
        text = resources.files("cavityspdc").joinpath("data/materials.json").read_text()
        _BUILTIN = MaterialCatalog(_parse_catalog_text(text, "builtin materials.json"))
    return _BUILTIN


def load_material_catalog(path=None) -> MaterialCatalog:
    """Built-in catalog, or the built-in merged with a user file.

    File entries override built-in entries with the same (material, axis);
    duplicate keys within one file are a conflict error.
    """
    if path is None:
        return builtin_catalog()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CatalogError(f"cannot read catalog file {path}: {exc}") from exc
    return builtin_catalog().merged_with(_parse_catalog_text(text, str(path)))
