"""Material catalog tour: refractive and group indices for the built-in
Sellmeier sets, plus a dispersion plot for congruent lithium niobate.

Writes demos/output/dispersion_ppln.svg.
"""

from pathlib import Path

import numpy as np

from cavityspdc.dispersion import builtin_catalog, group_index, refractive_index
from cavityspdc.plots import series_svg_bytes

OUT = Path(__file__).parent / "output"


def main():
    cat = builtin_catalog()
    print("built-in materials:")
    for model in cat.entries.values():
        lo, hi = model.wavelength_range_um
        print(f"  {model.material}/{model.axis}: {model.form}, "
              f"{lo:.2f}-{hi:.2f} um  ({model.citation})")

    print("\ntelecom operating point (1560 nm):")
    for material, axis, t in (("PPLN", "e", 80.0), ("PPLN", "o", 80.0),
                              ("PPKTP", "z", 25.0), ("PPKTP", "y", 25.0)):
        model = cat.get(material, axis)
        n = refractive_index(model, 1.560, t)
        n_g = group_index(model, 1.560, t)
        print(f"  {material}/{axis} at {t:.0f} C: n = {n:.6f}, N = {n_g:.6f}")

    # the e/o group-index walk-off drives the clustered emission spectrum
    lam = np.linspace(1.0, 2.2, 241)
    model_e = cat.get("PPLN", "e")
    model_o = cat.get("PPLN", "o")
    n_ge = group_index(model_e, lam, 80.0)
    n_go = group_index(model_o, lam, 80.0)
    svg = series_svg_bytes(
        [(lam * 1.0e3, n_ge, "group index, e axis"),
         (lam * 1.0e3, n_go, "group index, o axis")],
        xlabel="wavelength (nm)",
        ylabel="group index",
        title="PPLN at 80 C",
    )
    OUT.mkdir(exist_ok=True)
    dest = OUT / "dispersion_ppln.svg"
    dest.write_bytes(svg)
    print(f"\nwrote {dest}")
    print(f"walk-off at 1560 nm: {abs(n_ge[np.argmin(abs(lam - 1.56))] - n_go[np.argmin(abs(lam - 1.56))]):.4f}")


if __name__ == "__main__":
    main()
