"""Final pair fidelity of the adiabatic ramp versus ramp duration.

    python3 scripts/adiabatic_durations.py [--n 50] [--durations 12.5 25 50 100]
"""

import argparse

import numpy as np

from catspec.adiabatic import RampSchedule, evolve, parity_leak
from catspec.core import ModelParams

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=50)
    ap.add_argument("--u0", type=float, default=0.02)
    ap.add_argument("--start", type=float, default=1.5)
    ap.add_argument("--end", type=float, default=0.7)
    ap.add_argument("--shape", choices=("linear", "smoothstep"), default="linear")
    ap.add_argument("--durations", type=float, nargs="+", default=[12.5, 25.0, 50.0, 100.0])
    args = ap.parse_args()
    p = ModelParams(args.n, args.u0, 3 * args.u0)
    print("duration,fid0,fid01,max_norm_drift,parity_leak")
    for T in args.durations:
        tab = evolve(p, RampSchedule(args.start, args.end, T, args.shape))
        drift = float(np.max(np.abs(tab.norm - 1)))
        print(f"{T:g},{tab.fid0[-1]:.6f},{tab.fid01[-1]:.6f},{drift:.2e},{parity_leak(tab.final_state):.2e}")
