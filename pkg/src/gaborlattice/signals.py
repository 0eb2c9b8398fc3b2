"""Test signals and the forward lattice transform.

A signal f is either a finite sum of shifted/modulated Gaussians

    f(x) = sum_c  amp_c * exp(-(x - a_c)^2 / 4 + i b_c x)

(closed forms available for everything downstream) or an arbitrary
complex-valued sampler with growth metadata |f(x)| <= C exp(alpha|x|).

The forward transform computed here is the rectangular table of

    gamma_{m,k} = integral exp(-i k x - tau m x) f(x) exp(-x^2/4) dx,

whose entries grow like exp(tau^2 m^2) along m and are therefore
stored as ScaledValue.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, InvalidParameterError, NonConvergenceError
from .scaled import ScaledValue

LN_TWO_PI = math.log(2.0 * math.pi)

GAUSSIAN_FAMILY = "gaussian_family"
CALLBACK = "callback"


@dataclass(frozen=True)
class GaussianComponent:
    amplitude: complex
    center: float
    modulation: float


@dataclass(frozen=True)
class SignalModel:
    """A reconstructible signal; build via :meth:`gaussian` or :meth:`callback`."""

    kind: str
    components: tuple[GaussianComponent, ...] = ()
    sampler: Callable[[float], complex] | None = None
    bound: float = 0.0   # C  in |f(x)| <= C exp(alpha |x|)
    growth: float = 0.0  # alpha

    @classmethod
    def gaussian(cls, components: Sequence) -> "SignalModel":
        comps = []
        for item in components:
            if isinstance(item, GaussianComponent):
                comp = item
            else:
                amp, center, modulation = item
                comp = GaussianComponent(complex(amp), float(center), float(modulation))
            if not (
                math.isfinite(abs(comp.amplitude))
                and math.isfinite(comp.center)
                and math.isfinite(comp.modulation)
            ):
                raise InvalidParameterError(f"non-finite Gaussian component {comp!r}")
            comps.append(comp)
        if not comps:
            raise InvalidParameterError("a Gaussian-family signal needs >= 1 component")
        return cls(kind=GAUSSIAN_FAMILY, components=tuple(comps))

    @classmethod
    def callback(cls, sampler: Callable[[float], complex], bound: float,
                 growth: float) -> "SignalModel":
        """Black-box signal; ``bound``/``growth`` assert |f(x)| <= bound * e^{growth|x|}.

        The metadata is mandatory: the quadrature and summation routines
        size their truncation windows from it and refuse to guess.
        """
        if not callable(sampler):
            raise InvalidParameterError("sampler must be callable")
        if not (math.isfinite(bound) and bound >= 0):
            raise InvalidParameterError("bound must be a finite non-negative real")
        if not (math.isfinite(growth) and growth >= 0):
            raise InvalidParameterError("growth must be a finite non-negative real")
        return cls(kind=CALLBACK, sampler=sampler, bound=float(bound), growth=float(growth))

    def envelope_ln(self) -> tuple[float, float]:
        """(ln C, alpha) with |f(x)| <= C exp(alpha |x|)."""
        if self.kind == GAUSSIAN_FAMILY:
            total = sum(abs(c.amplitude) for c in self.components)
            return (math.log(total) if total > 0 else -math.inf, 0.0)
        return (math.log(self.bound) if self.bound > 0 else -math.inf, self.growth)


def eval_signal(signal: SignalModel, x: float) -> complex:
    """f(x)."""
    if not math.isfinite(x):
        raise DomainError(f"x must be finite, got {x!r}")
    if signal.kind == GAUSSIAN_FAMILY:
        total = 0j
        for c in signal.components:
            d = x - c.center
            total += c.amplitude * math.exp(-d * d / 4.0) * cmath.exp(1j * c.modulation * x)
        return total
    return complex(signal.sampler(x))


def windowed_sample_scaled(signal: SignalModel, x: float) -> ScaledValue:
    """(1/2pi) f(x) exp(-x^2/4) as a ScaledValue.

    For Gaussian families each component is assembled in log form, so
    far-tail samples never underflow to 0 * inf garbage when later
    multiplied by huge geometric weights.
    """
    if signal.kind == GAUSSIAN_FAMILY:
        total = ScaledValue.zero()
        for c in signal.components:
            mag = abs(c.amplitude)
            if mag == 0:
                continue
            d = x - c.center
            ln_mag = math.log(mag) - d * d / 4.0 - x * x / 4.0 - LN_TWO_PI
            phase = c.modulation * x + cmath.phase(c.amplitude)
            total = total + ScaledValue.from_ln(ln_mag, phase)
        return total
    value = ScaledValue.from_complex(complex(signal.sampler(x)))
    return value * ScaledValue.from_ln(-x * x / 4.0 - LN_TWO_PI)


@dataclass(frozen=True)
class QuadratureControl:
    """Composite-trapezoid refinement policy for callback signals."""

    tol: float = 1e-10
    max_refinements: int = 24

    def __post_init__(self):
        if not (0 < self.tol < 1):
            raise InvalidParameterError("quadrature tol must lie in (0, 1)")


_DEFAULT_QUAD = QuadratureControl()


def gamma_closed_form(m: int, k: int, signal: SignalModel, tau: float) -> ScaledValue:
    """Exact gamma_{m,k} for Gaussian families.

    Completing the square in
    integral exp(-x^2/2 + c x) dx = sqrt(2 pi) exp(c^2 / 2) gives, per
    component, amp * e^{-a^2/4} * sqrt(2 pi) * e^{s^2/2} with
    s = a/2 - tau m + i (b - k).
    """
    if signal.kind != GAUSSIAN_FAMILY:
        raise InvalidParameterError("closed form requires a Gaussian-family signal")
    total = ScaledValue.zero()
    for c in signal.components:
        mag = abs(c.amplitude)
        if mag == 0:
            continue
        sr = c.center / 2.0 - tau * m
        si = c.modulation - k
        re_half_s2 = (sr * sr - si * si) / 2.0
        im_half_s2 = sr * si
        ln_mag = math.log(mag) - c.center * c.center / 4.0 + re_half_s2 + 0.5 * LN_TWO_PI
        phase = im_half_s2 + cmath.phase(c.amplitude)
        total = total + ScaledValue.from_ln(ln_mag, phase)
    return total


def gamma_quadrature(
    m: int,
    k: int,
    signal: SignalModel,
    tau: float,
    quad: QuadratureControl = _DEFAULT_QUAD,
) -> ScaledValue:
    """gamma_{m,k} by refined composite trapezoid.

    Writing exp(-tau m x - x^2/4) = e^{tau^2 m^2} exp(-(x - x0)^2/4)
    with x0 = -2 tau m, the integral is computed on [x0 - R, x0 + R]
    with the scale e^{tau^2 m^2} kept in the exponent.

    The spacing starts below the oscillation scale of e^{-ikx} and is
    halved until successive estimates agree to quad.tol (a trapezoid
    rule on an analytic, Gaussian-windowed integrand converges
    super-geometrically, so this usually fires immediately).  The
    half-width R starts from the envelope metadata and then grows until
    the certified tail bound is below quad.tol relative to the computed
    value itself -- oscillatory cancellation can leave |gamma| orders of
    magnitude below the integrand scale, and only the a-posteriori test
    catches that.
    """
    ln_c, alpha = signal.envelope_ln()
    if ln_c == -math.inf:
        return ScaledValue.zero()
    x0 = -2.0 * tau * m

    def integrand(x: float) -> complex:
        d = x - x0
        return (
            cmath.exp(-1j * k * x)
            * eval_signal(signal, x)
            * math.exp(-d * d / 4.0)
        )

    def refine(lo: float, hi: float) -> tuple[complex, float]:
        """Halve the spacing to convergence; returns (value, abs_scale)."""
        h = min(0.25, math.pi / (2.0 * (abs(k) + 1.0)))
        n = max(2, math.ceil((hi - lo) / h))
        h = (hi - lo) / n
        total = 0.5 * (integrand(lo) + integrand(hi))
        abs_scale = 0.5 * (abs(integrand(lo)) + abs(integrand(hi)))
        for i in range(1, n):
            v = integrand(lo + i * h)
            total += v
            abs_scale += abs(v)
        estimate = total * h
        abs_scale *= h
        for _ in range(quad.max_refinements):
            mid_sum = 0j
            for i in range(n):
                mid_sum += integrand(lo + (i + 0.5) * h)
            refined = 0.5 * estimate + 0.5 * h * mid_sum
            n *= 2
            h *= 0.5
            # second term: roundoff floor of the accumulated sum
            if abs(refined - estimate) <= quad.tol * abs(refined) + 1e-15 * abs_scale:
                return refined, abs_scale
            estimate = refined
        raise NonConvergenceError(
            "gamma_quadrature: spacing refinement cap reached",
            diagnostics={"last": refined, "previous": estimate, "m": m, "k": k},
        )

    def half_width(ln_target: float) -> float:
        gap = max(1.0, alpha * alpha + ln_c + alpha * abs(x0) - ln_target)
        return 2.0 * alpha + 2.0 * math.sqrt(gap)

    r = half_width(math.log(quad.tol))
    for _ in range(6):
        lo, hi = x0 - r, x0 + r
        if signal.kind == CALLBACK:
            for endpoint in (lo, hi):
                observed = abs(complex(signal.sampler(endpoint)))
                allowed = 10.0 * math.exp(ln_c + alpha * abs(endpoint))
                if observed > allowed:
                    raise InvalidParameterError(
                        f"callback exceeds its declared envelope at x={endpoint:.6g}: "
                        f"|f| = {observed:.3e} > {allowed:.3e}"
                    )
        value, abs_scale = refine(lo, hi)
        floor = 1e-15 * abs_scale
        if abs(value) <= floor:  # value at the roundoff floor: tails immaterial
            return ScaledValue.from_ln(tau * tau * m * m) * value
        edge_ln = ln_c + alpha * max(abs(lo), abs(hi)) - r * r / 4.0 + math.log(4.0)
        if edge_ln <= math.log(quad.tol * abs(value)):
            return ScaledValue.from_ln(tau * tau * m * m) * value
        r = half_width(math.log(quad.tol * abs(value)) - 3.0)
    raise NonConvergenceError(
        "gamma_quadrature: truncation window kept growing without certification",
        diagnostics={"last": value, "half_width": r, "m": m, "k": k},
    )


class GammaTable:
    """Immutable (2M+1) x (2K+1) table of scaled lattice coefficients."""

    def __init__(self, M: int, K: int, tau: float, values):
        self.M = M
        self.K = K
        self.tau = tau
        arr = np.empty((2 * M + 1, 2 * K + 1), dtype=object)
        for i in range(2 * M + 1):
            for j in range(2 * K + 1):
                arr[i, j] = values[i][j]
        arr.setflags(write=False)
        self.values = arr

    def get(self, m: int, k: int) -> ScaledValue:
        if abs(m) > self.M or abs(k) > self.K:
            raise InvalidParameterError(
                f"(m={m}, k={k}) outside table extents M={self.M}, K={self.K}"
            )
        return self.values[m + self.M, k + self.K]

    def row(self, m: int) -> list[ScaledValue]:
        if abs(m) > self.M:
            raise InvalidParameterError(f"m={m} outside table extent M={self.M}")
        return list(self.values[m + self.M, :])

    def to_payload(self) -> dict:
        """Columnar, JSON-ready form (bit-exact round trip)."""
        ms, ks, re, im, ex = [], [], [], [], []
        for m in range(-self.M, self.M + 1):
            for k in range(-self.K, self.K + 1):
                sv = self.get(m, k)
                ms.append(m)
                ks.append(k)
                re.append(sv.mantissa.real)
                im.append(sv.mantissa.imag)
                ex.append(sv.exponent)
        return {"m": ms, "k": ks, "mantissa_re": re, "mantissa_im": im, "exponent": ex}

    @classmethod
    def from_payload(cls, M: int, K: int, tau: float, payload: dict) -> "GammaTable":
        rows = [[None] * (2 * K + 1) for _ in range(2 * M + 1)]
        for m, k, re, im, ex in zip(
            payload["m"], payload["k"], payload["mantissa_re"],
            payload["mantissa_im"], payload["exponent"],
        ):
            rows[m + M][k + K] = ScaledValue(complex(re, im), ex)
        if any(entry is None for row in rows for entry in row):
            raise InvalidParameterError("payload does not cover the full index range")
        return cls(M, K, tau, rows)

    def __eq__(self, other):
        if not isinstance(other, GammaTable):
            return NotImplemented
        return (
            self.M == other.M
            and self.K == other.K
            and self.tau == other.tau
            and all(
                self.values[i, j] == other.values[i, j]
                for i in range(2 * self.M + 1)
                for j in range(2 * self.K + 1)
            )
        )


def forward_table(
    signal: SignalModel,
    tau: float,
    M: int,
    K: int,
    quad: QuadratureControl = _DEFAULT_QUAD,
    threads: int = 1,
) -> GammaTable:
    """Fill the full coefficient table, closed form where available.

    Entries are independent, so rows fan out across a thread pool when
    ``threads > 1``; results are reassembled by index, making the table
    identical for every thread count.
    """
    if M < 0 or K < 0:
        raise InvalidParameterError("M and K must be non-negative")
    if not (math.isfinite(tau) and tau > 0):
        raise InvalidParameterError(f"tau must be a finite positive real, got {tau!r}")

    if signal.kind == GAUSSIAN_FAMILY:
        entry = lambda m, k: gamma_closed_form(m, k, signal, tau)
    else:
        entry = lambda m, k: gamma_quadrature(m, k, signal, tau, quad)

    def build_row(m: int) -> list[ScaledValue]:
        return [entry(m, k) for k in range(-K, K + 1)]

    ms = list(range(-M, M + 1))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(build_row, ms))
    else:
        rows = [build_row(m) for m in ms]
    return GammaTable(M, K, tau, rows)
