"""Where does the symmetric field profile split? Gaussian instability point versus
the Thomas-Fermi threshold, as a function of N (a_sc = 50 nm, a_AB = 150 nm, x0 = 3 um).

    python3 scripts/transition_scan.py [--n 100 300 1000 3000]
"""

import argparse
import math

from catspec.core import ModelParams
from catspec.field_meanfield import gaussian_Lambda0, tf_Lambda0
from catspec.field_variational import Lambda_scale

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[100, 300, 1000, 3000])
    ap.add_argument("--a-sc", type=float, default=50.0, help="same-species scattering length, nm")
    ap.add_argument("--a-ab", type=float, default=150.0, help="cross-species scattering length, nm")
    ap.add_argument("--x0", type=float, default=3.0, help="trap length, um")
    args = ap.parse_args()
    u0 = 4 * math.pi * args.a_sc / (1000 * args.x0)
    u1 = 4 * math.pi * args.a_ab / (1000 * args.x0)
    print("N,Lambda0_gaussian,Lambda0_tf,number_resolved_scale")
    for n in args.n:
        p = ModelParams(n, u0, u1)
        q = ModelParams(n, u0, u1, apply_tilde_rescale=False)
        print(f"{n},{gaussian_Lambda0(p):.6g},{tf_Lambda0(p):.6g},{Lambda_scale(q):.6g}")
