"""Fabry-Perot figures of merit for two reference devices, plus the Airy
lineshape and a finesse-vs-reflectivity sweep.

Writes demos/output/airy_lineshape.svg and finesse_vs_r2.svg.
"""

import math
from pathlib import Path

import numpy as np

from cavityspdc.cavity import (
    CavitySpec,
    airy_transmission,
    finesse,
    mode_figures,
    pair_emission_probability,
    round_trip_factor,
)
from cavityspdc.plots import series_svg_bytes

OUT = Path(__file__).parent / "output"

# group indices for PPLN type II at 1560/1560 nm, 80 C (see demo 01)
N_SIGNAL = 2.1847
N_IDLER = 2.2638


def report(label: str, spec: CavitySpec):
    fig = mode_figures(spec, N_SIGNAL, N_IDLER)
    print(f"{label}: L = {spec.length_cm} cm, R2 = {spec.r2}, "
          f"alpha = {spec.alpha_db_cm} dB/cm")
    print(f"  round-trip factor {round_trip_factor(spec):.6f}, "
          f"finesse {fig.finesse:.2f}")
    print(f"  FSR signal/idler {fig.fsr_signal_hz / 1e9:.3f}/"
          f"{fig.fsr_idler_hz / 1e9:.3f} GHz")
    print(f"  mode bandwidth {fig.mode_bandwidth_hz / 1e6:.1f} MHz, "
          f"coherence time {fig.coherence_time_s * 1e9:.3f} ns")
    print(f"  pair emission probability {pair_emission_probability(spec):.4f}")


def main():
    short = CavitySpec(length_cm=0.1, r1=1.0, r2=0.95, alpha_db_cm=0.06)
    long_ = CavitySpec(length_cm=3.6, r1=0.85, r2=0.85, alpha_db_cm=0.06)
    report("short waveguide cavity", short)
    report("long bulk-style cavity", long_)

    OUT.mkdir(exist_ok=True)

    phi = np.linspace(-0.5 * math.pi, 1.5 * math.pi, 4001)
    svg = series_svg_bytes(
        [(phi / math.pi, airy_transmission(short, phi), f"F = {finesse(short):.1f}"),
         (phi / math.pi, airy_transmission(long_, phi), f"F = {finesse(long_):.1f}")],
        xlabel="round-trip phase / pi",
        ylabel="Airy transmission",
        title="resonance lineshapes",
    )
    (OUT / "airy_lineshape.svg").write_bytes(svg)
    print(f"wrote {OUT / 'airy_lineshape.svg'}")

    r2 = np.linspace(0.5, 0.999, 400)
    f = np.array([finesse(CavitySpec(0.1, 1.0, float(r), 0.06)) for r in r2])
    svg = series_svg_bytes(
        [(r2, f, "L = 0.1 cm, alpha = 0.06 dB/cm")],
        xlabel="output mirror reflectivity R2",
        ylabel="finesse",
    )
    (OUT / "finesse_vs_r2.svg").write_bytes(svg)
    print(f"wrote {OUT / 'finesse_vs_r2.svg'}")


if __name__ == "__main__":
    main()
