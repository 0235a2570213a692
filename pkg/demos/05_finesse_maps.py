"""Single-mode finesse bound across the emission band for each material,
interaction type and pump.

The bound F(M=1) = |N_s + N_i| / (2 |N_s - N_i|) tells how good a cavity
must be before a cluster holds just one mode.  Type 0 diverges at
degeneracy (equal group indices); type II stays low across telecom, which
is why it is the natural choice there.

Writes demos/output/finesse_map_780.svg and finesse_map_532.svg.
"""

from pathlib import Path

import numpy as np

from cavityspdc import finesse_curve
from cavityspdc.plots import series_svg_bytes

OUT = Path(__file__).parent / "output"


def main():
    OUT.mkdir(exist_ok=True)
    for pump in (780.0, 532.0):
        series = []
        for material in ("PPLN", "PPKTP"):
            for interaction, tag in (("eee", "type 0"), ("eoe", "type II")):
                lams, values = finesse_curve(
                    pump, material, interaction, (1450.0, 1700.0), 24.5, 501
                )
                series.append((lams, values, f"{material} {tag}"))
                i_min = np.nanargmin(values)
                print(f"pump {pump:.0f} nm, {material} {tag}: "
                      f"min bound {values[i_min]:.1f} at {lams[i_min]:.0f} nm")
        svg = series_svg_bytes(
            series,
            xlabel="signal wavelength (nm)",
            ylabel="single-mode finesse bound",
            log_scale=True,
            title=f"{pump:.0f} nm pump, 24.5 C",
        )
        dest = OUT / f"finesse_map_{pump:.0f}.svg"
        dest.write_bytes(svg)
        print(f"wrote {dest}")


if __name__ == "__main__":
    main()
