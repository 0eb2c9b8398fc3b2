"""Reconstruction of a signal from its lattice coefficient table.

The one-step inversion evaluated here is

    f(x) = C0 * e^{x^2/4} * sum_m E_m(tau) e^{m tau x}
                              * sum_k gamma_{m,k} e^{i k x}

with C0 = 1/(2 pi); :func:`calibrate_constant` re-derives C0 from a
round trip so the constant is pinned by the code, not by trust.  The
exterior sum converges only for tau < pi, and the module refuses to
run outside that regime.

All accumulation happens in scaled arithmetic with a fixed summation
order (m = 0, +1, -1, ...; k = 0, +1, -1, ...), so results are
bit-reproducible no matter how the caller parallelises.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import InvalidParameterError, NonConvergenceError, RegimeError
from .qtheta import SUBCRITICAL, LatticeParams, SeriesControl, coeff_E
from .scaled import ScaledValue
from .signals import GammaTable, QuadratureControl, SignalModel, eval_signal, forward_table
from .signals import GAUSSIAN_FAMILY, gamma_closed_form, gamma_quadrature

#: global normalisation of the reconstruction formula (see calibrate_constant)
RECONSTRUCTION_CONSTANT = 1.0 / (2.0 * math.pi)

MAX_M = 64
MAX_K = 4096
MAX_GRID_POINTS = 10**7

DIRECT = "direct"
FOURIER_GRID = "fourier_grid"


@dataclass(frozen=True)
class ReconConfig:
    """Target accuracy, evaluation grid and truncation policy."""

    tol: float = 1e-8
    grid: tuple[float, float, float] = (-3.0, 3.0, 0.05)  # (x_min, x_max, step)
    mode: str = DIRECT
    truncation: tuple[int, int] | None = None  # explicit (M, K) or None for automatic

    def __post_init__(self):
        if not (0 < self.tol < 1):
            raise InvalidParameterError("tol must lie in (0, 1)")
        x_min, x_max, step = self.grid
        if not (math.isfinite(x_min) and math.isfinite(x_max) and step > 0):
            raise InvalidParameterError(f"bad grid {self.grid!r}")
        if self.mode not in (DIRECT, FOURIER_GRID):
            raise InvalidParameterError(f"unknown mode {self.mode!r}")
        if self.truncation is not None:
            M, K = self.truncation
            if M < 0 or K < 0:
                raise InvalidParameterError("explicit truncation orders must be >= 0")


@dataclass
class ReconReport:
    """Grid reconstruction output plus error metrics against a reference.

    sup_error is sup|rec - ref| / sup|ref| and l2_error the relative
    l2 norm of the pointwise difference, so l2_error <=
    sup_error * sqrt(len(xs)) always holds.  Both are None without a
    reference.  tail_estimate is the (dimensionless) weight of the
    outermost retained ring relative to the dominant term.
    """

    xs: np.ndarray
    reconstructed: np.ndarray
    reference: np.ndarray | None
    sup_error: float | None
    l2_error: float | None
    M_used: int
    K_used: int
    tail_estimate: float
    elapsed: float


@dataclass(frozen=True)
class TruncationChoice:
    M: int
    K: int
    tail_estimate: float


def grid_points(grid: tuple[float, float, float]) -> np.ndarray:
    """Deterministic grid x_min, x_min + step, ...; empty when x_min > x_max."""
    x_min, x_max, step = grid
    if x_min > x_max:
        return np.empty(0, dtype=float)
    count = int(math.floor((x_max - x_min) / step + 1e-9)) + 1
    if count > MAX_GRID_POINTS:  # guard before allocating anything
        raise InvalidParameterError(
            f"grid with {count} points exceeds the desk-scale guard ({MAX_GRID_POINTS})"
        )
    return x_min + step * np.arange(count, dtype=float)


def _require_subcritical(params: LatticeParams):
    if params.regime != SUBCRITICAL:
        raise RegimeError(
            f"reconstruction requires tau < pi (subcritical lattice); "
            f"tau = {params.tau:.12g} is {params.regime}"
        )


def inner_fourier_sum(row: Sequence[ScaledValue], x: float, K: int) -> ScaledValue:
    """sum_{k=-K}^{K} gamma_{m,k} e^{ikx}, accumulated k = 0, +1, -1, ..."""
    if len(row) != 2 * K + 1:
        raise InvalidParameterError(
            f"row must hold 2K+1 = {2 * K + 1} entries, got {len(row)}"
        )
    total = row[K]
    for k in range(1, K + 1):
        phase = complex(math.cos(k * x), math.sin(k * x))
        total = total + row[K + k] * phase
        total = total + row[K - k] * phase.conjugate()
    return total


def _exterior_sum(x: float, tau: float, coeffs: Sequence[ScaledValue],
                  inner, M: int) -> ScaledValue:
    """sum_m E_m e^{m tau x} S_m(x), order m = 0, +1, -1, ...

    ``inner(m)`` supplies the (possibly cached) interior Fourier sum.
    """
    total = coeffs[M] * inner(0)
    for m in range(1, M + 1):
        total = total + coeffs[M + m] * ScaledValue.from_ln(m * tau * x) * inner(m)
        total = total + coeffs[M - m] * ScaledValue.from_ln(-m * tau * x) * inner(-m)
    return total


def reconstruct_point(
    x: float,
    table: GammaTable,
    params: LatticeParams,
    coeffs: Sequence[ScaledValue],
    M: int,
    K: int,
) -> complex:
    """Evaluate the reconstruction at a single point."""
    _require_subcritical(params)
    if M > table.M or K > table.K:
        raise InvalidParameterError(
            f"requested truncation (M={M}, K={K}) exceeds table extents "
            f"(M={table.M}, K={table.K})"
        )
    if len(coeffs) < 2 * M + 1:
        raise InvalidParameterError("coefficient sequence does not cover [-M, M]")
    offset = (len(coeffs) - 1) // 2

    def inner(m: int) -> ScaledValue:
        row = table.row(m)
        lo = table.K - K
        return inner_fourier_sum(row[lo: lo + 2 * K + 1], x, K)

    shifted = [coeffs[offset - M + i] for i in range(2 * M + 1)]
    total = _exterior_sum(x, params.tau, shifted, inner, M)
    return (RECONSTRUCTION_CONSTANT * ScaledValue.from_ln(x * x / 4.0) * total).to_complex()


# --------------------------------------------------------------- truncation


def _gamma_source(signal: SignalModel, tau: float, quad: QuadratureControl | None):
    quad = quad or QuadratureControl()
    cache: dict[tuple[int, int], ScaledValue] = {}

    def gamma(m: int, k: int) -> ScaledValue:
        key = (m, k)
        if key not in cache:
            if signal.kind == GAUSSIAN_FAMILY:
                cache[key] = gamma_closed_form(m, k, signal, tau)
            else:
                cache[key] = gamma_quadrature(m, k, signal, tau, quad)
        return cache[key]

    return gamma


def auto_truncation(
    signal: SignalModel,
    params: LatticeParams,
    tol: float,
    x_max: float = 0.0,
    ctrl: SeriesControl | None = None,
    quad: QuadratureControl | None = None,
) -> TruncationChoice:
    """Choose truncation orders (M, K) for a target relative accuracy.

    The base estimate takes the subcritical decay rate eps = tau(pi - tau)
    of the weighted terms |E_m| * row-scale and picks the smallest M with
    exp(-eps M^2) < tol/10.  Because that rate is a worst-case envelope,
    the estimate is then verified against the actually computed weighted
    boundary ring (including the e^{|m| tau x_max} reach of the target
    grid) and grown until the ring drops below tol; K is extended the
    same way column-wise.  One guard ring is added at the end.
    """
    _require_subcritical(params)
    if not (0 < tol < 1):
        raise InvalidParameterError("tol must lie in (0, 1)")
    ctrl = ctrl or SeriesControl()
    tau = params.tau
    eps = tau * (math.pi - tau)
    M = max(1, math.ceil(math.sqrt(math.log(10.0 / tol) / eps)))
    M = min(M, MAX_M)
    K = 2
    ln_tol = math.log(tol)

    gamma = _gamma_source(signal, tau, quad)
    coeff_cache: dict[int, float] = {}

    def e_ln(m: int) -> float:
        if m not in coeff_cache:
            coeff_cache[m] = coeff_E(m, params, ctrl).ln_abs()
        return coeff_cache[m]

    def cell_ln(m: int, k: int) -> float:
        return e_ln(m) + gamma(m, k).ln_abs()

    def ring_ln(m: int, K_cur: int) -> float:
        best = max(cell_ln(m, k) for k in range(-K_cur, K_cur + 1))
        return best + abs(m) * tau * x_max

    def col_ln(k: int, M_cur: int) -> float:
        return max(cell_ln(m, k) for m in range(-M_cur, M_cur + 1))

    def scale_ln(M_cur: int, K_cur: int) -> float:
        return max(
            cell_ln(m, k)
            for m in range(-M_cur, M_cur + 1)
            for k in range(-K_cur, K_cur + 1)
        )

    for _ in range(MAX_M + MAX_K):
        scale = scale_ln(M, K)
        if scale == -math.inf:  # identically zero signal
            return TruncationChoice(M, K, 0.0)
        grew = False
        while max(col_ln(K, M), col_ln(-K, M)) >= ln_tol + scale and K < MAX_K:
            K += 1
            grew = True
        while max(ring_ln(M, K), ring_ln(-M, K)) >= ln_tol + scale and M < MAX_M:
            M += 1
            grew = True
        if not grew:
            break
    else:
        raise NonConvergenceError(
            "auto_truncation did not stabilise", diagnostics={"M": M, "K": K}
        )

    scale = scale_ln(M, K)
    boundary = max(ring_ln(M, K), ring_ln(-M, K), col_ln(K, M), col_ln(-K, M))
    if boundary >= ln_tol + scale:
        raise NonConvergenceError(
            "auto_truncation: weighted tail still above tol at the hard caps",
            diagnostics={"M": M, "K": K, "tail_ln": boundary - scale},
        )
    # guard ring ("verification margin")
    M = min(M + 1, MAX_M)
    K = min(K + 2, MAX_K)
    tail = math.exp(
        max(ring_ln(M, K), ring_ln(-M, K), col_ln(K, M), col_ln(-K, M)) - scale_ln(M, K)
    )
    return TruncationChoice(M, K, tail)


def _auto_within_table(
    table: GammaTable, params: LatticeParams, tol: float, x_max: float
) -> TruncationChoice:
    """auto_truncation against a prebuilt table: cannot exceed its extents,
    so a table that is too small simply yields a larger tail_estimate."""
    tau = params.tau
    eps = tau * (math.pi - tau)
    M = min(max(1, math.ceil(math.sqrt(math.log(10.0 / tol) / eps))), table.M)
    K = min(2, table.K)
    ln_tol = math.log(tol)
    coeff_cache: dict[int, float] = {}

    def e_ln(m: int) -> float:
        if m not in coeff_cache:
            coeff_cache[m] = coeff_E(m, params).ln_abs()
        return coeff_cache[m]

    def cell_ln(m: int, k: int) -> float:
        return e_ln(m) + table.get(m, k).ln_abs()

    def ring_ln(m: int, K_cur: int) -> float:
        best = max(cell_ln(m, k) for k in range(-K_cur, K_cur + 1))
        return best + abs(m) * tau * x_max

    def col_ln(k: int, M_cur: int) -> float:
        return max(cell_ln(m, k) for m in range(-M_cur, M_cur + 1))

    def scale_ln(M_cur: int, K_cur: int) -> float:
        return max(
            cell_ln(m, k)
            for m in range(-M_cur, M_cur + 1)
            for k in range(-K_cur, K_cur + 1)
        )

    for _ in range(table.M + table.K + 2):
        scale = scale_ln(M, K)
        if scale == -math.inf:
            return TruncationChoice(M, K, 0.0)
        grew = False
        while K < table.K and max(col_ln(K, M), col_ln(-K, M)) >= ln_tol + scale:
            K += 1
            grew = True
        while M < table.M and max(ring_ln(M, K), ring_ln(-M, K)) >= ln_tol + scale:
            M += 1
            grew = True
        if not grew:
            break
    scale = scale_ln(M, K)
    if scale == -math.inf:
        return TruncationChoice(M, K, 0.0)
    boundary = max(ring_ln(M, K), ring_ln(-M, K), col_ln(K, M), col_ln(-K, M))
    return TruncationChoice(M, K, math.exp(boundary - scale))


# --------------------------------------------------------------- grid driver


def _rational_residue_period(step: float) -> int | None:
    """Number of grid steps after which x mod 2pi repeats, if step/2pi is
    (numerically) rational with a small denominator."""
    ratio = step / (2.0 * math.pi)
    frac = Fraction(ratio).limit_denominator(8192)
    if frac.numerator <= 0:
        return None
    if abs(frac.numerator / frac.denominator - ratio) <= 1e-12 * ratio:
        return frac.denominator
    return None


def reconstruct_grid(
    config: ReconConfig,
    table: GammaTable,
    params: LatticeParams,
    reference: SignalModel | None = None,
    threads: int = 1,
) -> ReconReport:
    """Evaluate the reconstruction on a grid and report errors.

    mode="fourier_grid" computes each interior sum once per residue
    class of x mod 2pi (the interior sums are 2pi-periodic) and applies
    the non-periodic prefactors per actual point; when the grid step
    does not divide 2pi rationally this silently reduces to the direct
    mode.  Both modes agree to ~1e-12 relative wherever the exterior
    sum is well conditioned.

    Conditioning caveat: far beyond |x| ~ pi the exterior sum cancels
    the aliased images g(x + 2 pi j) many digits deep (the weighted
    terms are O(g(x mod 2pi)) while the result is O(g(x))), so the
    pointwise relative accuracy degrades like g(x mod 2pi) / g(x) * eps
    even though errors relative to sup|f| stay tiny.
    """
    start = time.perf_counter()
    _require_subcritical(params)
    if abs(table.tau - params.tau) > 1e-12 * max(1.0, abs(params.tau)):
        raise InvalidParameterError(
            f"table tau {table.tau!r} does not match params tau {params.tau!r}"
        )
    xs = grid_points(config.grid)
    x_reach = float(np.max(np.abs(xs))) if len(xs) else 0.0

    if config.truncation is not None:
        M, K = config.truncation
        if M > table.M or K > table.K:
            raise InvalidParameterError(
                f"explicit truncation (M={M}, K={K}) exceeds table extents"
            )
        tail = _auto_within_table(table, params, config.tol, x_reach).tail_estimate
    else:
        choice = _auto_within_table(table, params, config.tol, x_reach)
        M, K, tail = choice.M, choice.K, choice.tail_estimate

    coeffs = [coeff_E(m, params) for m in range(-M, M + 1)]

    period = None
    if config.mode == FOURIER_GRID:
        period = _rational_residue_period(config.grid[2])

    rec = np.zeros(len(xs), dtype=complex)
    if period is None:
        def at_point(i: int) -> complex:
            return reconstruct_point(float(xs[i]), table, params, coeffs, M, K)

        indices = range(len(xs))
        if threads > 1 and len(xs):
            with ThreadPoolExecutor(max_workers=threads) as pool:
                for i, value in zip(indices, pool.map(at_point, indices)):
                    rec[i] = value
        else:
            for i in indices:
                rec[i] = at_point(i)
    else:
        # interior sums per (residue class, m), evaluated at the class
        # representative; prefactors use the actual x
        lo = table.K - K
        classes = list(range(min(period, len(xs))))

        def class_inners(c: int) -> list[ScaledValue]:
            x_rep = float(xs[c])
            return [
                inner_fourier_sum(table.row(m)[lo: lo + 2 * K + 1], x_rep, K)
                for m in range(-M, M + 1)
            ]

        if threads > 1 and classes:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                cached = list(pool.map(class_inners, classes))
        else:
            cached = [class_inners(c) for c in classes]
        for i in range(len(xs)):
            x = float(xs[i])
            inners = cached[i % period]
            total = _exterior_sum(
                x, params.tau, coeffs, lambda m: inners[m + M], M
            )
            rec[i] = (
                RECONSTRUCTION_CONSTANT * ScaledValue.from_ln(x * x / 4.0) * total
            ).to_complex()

    ref_values = None
    sup_error = l2_error = None
    if reference is not None:
        ref_values = np.array([eval_signal(reference, float(x)) for x in xs], dtype=complex)
        diff = np.abs(rec - ref_values)
        if len(xs):
            sup_ref = float(np.max(np.abs(ref_values)))
            l2_ref = float(np.linalg.norm(ref_values))
            sup_error = float(np.max(diff)) / sup_ref if sup_ref > 0 else float(np.max(diff))
            l2_error = float(np.linalg.norm(diff)) / l2_ref if l2_ref > 0 else float(
                np.linalg.norm(diff)
            )
        else:
            sup_error = l2_error = 0.0

    return ReconReport(
        xs=xs,
        reconstructed=rec,
        reference=ref_values,
        sup_error=sup_error,
        l2_error=l2_error,
        M_used=M,
        K_used=K,
        tail_estimate=tail,
        elapsed=time.perf_counter() - start,
    )


def round_trip(
    signal: SignalModel,
    tau: float | LatticeParams,
    config: ReconConfig | None = None,
    quad: QuadratureControl | None = None,
    threads: int = 1,
) -> ReconReport:
    """Forward transform a known signal and reconstruct it on the grid.

    The primary end-to-end correctness check: truncation is chosen by
    :func:`auto_truncation` (unless the config pins it), the table is
    built to exactly that size, and the report carries the errors
    against the original signal.
    """
    from .qtheta import nome_from_tau

    params = tau if isinstance(tau, LatticeParams) else nome_from_tau(tau)
    config = config or ReconConfig()
    xs = grid_points(config.grid)
    x_reach = float(np.max(np.abs(xs))) if len(xs) else 0.0
    if config.truncation is not None:
        M, K = config.truncation
    else:
        choice = auto_truncation(signal, params, config.tol, x_max=x_reach, quad=quad)
        M, K = choice.M, choice.K
    table = forward_table(signal, params.tau, M, K, quad=quad or QuadratureControl(),
                          threads=threads)
    pinned = ReconConfig(tol=config.tol, grid=config.grid, mode=config.mode,
                         truncation=(M, K))
    return reconstruct_grid(pinned, table, params, reference=signal, threads=threads)


def calibrate_constant(tau: float = 1.0, x: float = 0.0, M: int = 8, K: int = 16) -> float:
    """Fit the global constant C0 from one tight round trip.

    Reconstructs the unit Gaussian at ``x`` with the constant left out
    and solves f(x) = C0 * raw for C0.  The shipped
    RECONSTRUCTION_CONSTANT must equal the fitted value (1/(2 pi)) to
    ~1e-8 relative; the acceptance suite asserts exactly that.
    """
    from .qtheta import nome_from_tau

    params = nome_from_tau(tau)
    _require_subcritical(params)
    signal = SignalModel.gaussian([(1.0, 0.0, 0.0)])
    table = forward_table(signal, params.tau, M, K)
    coeffs = [coeff_E(m, params) for m in range(-M, M + 1)]

    def inner(m: int) -> ScaledValue:
        return inner_fourier_sum(table.row(m), x, K)

    total = _exterior_sum(x, params.tau, coeffs, inner, M)
    raw = (ScaledValue.from_ln(x * x / 4.0) * total).to_complex()
    fitted = eval_signal(signal, x) / raw
    return fitted.real
