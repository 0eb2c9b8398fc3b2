#!/usr/bin/env python3
"""What happens on the way to the critical sampling density tau = pi.

Reconstruction needs tau < pi.  At a fixed truncation order the error
of a wide test signal grows as tau approaches the threshold, the
automatic truncation order needed for a fixed accuracy grows too, and
above pi the library refuses outright rather than returning a silently
wrong answer.

The test signal is deliberately wide (components spread over
[-12, 12]): a lone narrow Gaussian hides the degradation because its
aliased sums sit far below the worst-case envelope.
"""

import math

from gaborlattice import (
    ReconConfig,
    RegimeError,
    SignalModel,
    auto_truncation,
    nome_from_tau,
    round_trip,
)

wide = SignalModel.gaussian([(1.0, c, 0.0) for c in (-12.0, -6.0, 0.0, 6.0, 12.0)])
narrow = SignalModel.gaussian([(1.0, 0.0, 0.0)])

print("fixed truncation (M=2, K=10), grid [-3, 3]:")
print(f"{'tau/pi':>8} {'regime':>14} {'sup error':>12}")
for frac in (0.5, 0.7, 0.8, 0.9, 0.95):
    tau = frac * math.pi
    rep = round_trip(wide, tau, ReconConfig(grid=(-3.0, 3.0, 0.1), truncation=(2, 10)))
    print(f"{frac:>8.2f} {nome_from_tau(tau).regime:>14} {rep.sup_error:>12.2e}")

print()
print("truncation needed for tol = 1e-8 (the narrow Gaussian this time):")
print(f"{'tau/pi':>8} {'M':>4} {'K':>4} {'tail estimate':>14}")
for frac in (0.3, 0.5, 0.8, 0.95, 0.99):
    tau = frac * math.pi
    choice = auto_truncation(narrow, nome_from_tau(tau), 1e-8, x_max=3.0)
    print(f"{frac:>8.2f} {choice.M:>4} {choice.K:>4} {choice.tail_estimate:>14.2e}")

print()
print("beyond the threshold:")
for frac in (1.0, 1.05):
    tau = frac * math.pi
    try:
        round_trip(narrow, tau, ReconConfig(grid=(-1.0, 1.0, 0.5)))
        print(f"  tau = {frac:.2f} pi: reconstructed (unexpected!)")
    except RegimeError as exc:
        print(f"  tau = {frac:.2f} pi: refused -- {exc}")
