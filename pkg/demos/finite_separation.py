"""Finite separation: P_i E_j P_i = 0 for i != j forces E = P.

Shows one exact instance, one refused instance, the square-root size of the
error bound, and a short randomized sweep.

    python3 demos/finite_separation.py
"""
from __future__ import annotations

import numpy as np

from spectracert import FinitePOVM, FinitePVM, conclude_equality_check, hypothesis_holds, povm_sweep
from spectracert.errors import HypothesisNotVerified
from spectracert.povm import perturbed_povm, random_pvm


def main():
    P = FinitePVM([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    print("E = P:", conclude_equality_check(P, FinitePOVM(P.P)))
    E1 = np.full((2, 2), 0.5)
    res = hypothesis_holds(P, FinitePOVM([E1, np.eye(2) - E1]))
    print(f"rotated effects: hypothesis holds={res.holds}, witness pair {res.witness}")
    try:
        conclude_equality_check(P, FinitePOVM([E1, np.eye(2) - E1]))
    except HypothesisNotVerified as exc:
        print("refused:", exc)
    rng = np.random.default_rng(0)
    pvm = random_pvm(8, 4, rng)
    for angle in (1e-5, 1e-6, 1e-7):
        out = conclude_equality_check(pvm, perturbed_povm(pvm, angle, rng))
        print(f"angle {angle:.0e}: residual {out.hypothesis_residual:.2e}, "
              f"deviation {out.max_deviation:.2e} <= bound {out.bound:.2e}")
    print(povm_sweep(1000, seed=7).to_dict())


if __name__ == "__main__":
    main()
