import math

import numpy as np
import pytest

from gaborlattice import (
    InvalidParameterError,
    RECONSTRUCTION_CONSTANT,
    ReconConfig,
    RegimeError,
    ScaledValue,
    SignalModel,
    auto_truncation,
    calibrate_constant,
    coeff_E,
    eval_signal,
    forward_table,
    grid_points,
    inner_fourier_sum,
    nome_from_tau,
    reconstruct_grid,
    reconstruct_point,
    round_trip,
)


class TestInnerSum:
    def test_zero_row(self):
        row = [ScaledValue.zero()] * 5
        assert inner_fourier_sum(row, 0.7, 2).is_zero

    def test_constant_term_only(self):
        row = [ScaledValue.zero()] * 2 + [ScaledValue.one()] + [ScaledValue.zero()] * 2
        for x in (-2.0, 0.0, 1.3):
            assert inner_fourier_sum(row, x, 2).to_complex() == 1.0

    def test_row_length_checked(self):
        with pytest.raises(InvalidParameterError):
            inner_fourier_sum([ScaledValue.one()] * 4, 0.0, 2)

    def test_single_mode(self):
        # gamma_{m,1} = 1 only: sum is e^{ix}
        row = [ScaledValue.zero(), ScaledValue.zero(), ScaledValue.zero(),
               ScaledValue.one(), ScaledValue.zero()]
        x = 0.9
        got = inner_fourier_sum(row, x, 2).to_complex()
        assert got == pytest.approx(complex(math.cos(x), math.sin(x)), rel=1e-15)


class TestReconstructPoint:
    def test_zero_table(self, params_tau1):
        zero = SignalModel.gaussian([(0.0, 0.0, 0.0)])
        table = forward_table(zero, 1.0, 2, 2)
        coeffs = [coeff_E(m, params_tau1) for m in range(-2, 3)]
        for x in (-1.0, 0.0, 2.0):
            assert reconstruct_point(x, table, params_tau1, coeffs, 2, 2) == 0j

    def test_supercritical_refused(self):
        params = nome_from_tau(3.5)
        zero = SignalModel.gaussian([(0.0, 0.0, 0.0)])
        table = forward_table(zero, 3.5, 1, 1)
        with pytest.raises(RegimeError):
            reconstruct_point(0.0, table, params, [ScaledValue.zero()] * 3, 1, 1)

    def test_critical_refused(self):
        params = nome_from_tau(math.pi)
        zero = SignalModel.gaussian([(0.0, 0.0, 0.0)])
        table = forward_table(zero, math.pi, 1, 1)
        with pytest.raises(RegimeError):
            reconstruct_point(0.0, table, params, [ScaledValue.zero()] * 3, 1, 1)

    def test_pointwise_roundtrip(self, unit_gaussian, params_tau1):
        table = forward_table(unit_gaussian, 1.0, 6, 10)
        coeffs = [coeff_E(m, params_tau1) for m in range(-6, 7)]
        for x in (-3.0, -0.7, 0.0, 1.9, 3.0):
            rec = reconstruct_point(x, table, params_tau1, coeffs, 6, 10)
            assert abs(rec - eval_signal(unit_gaussian, x)) <= 1e-6

    def test_linearity_of_tables(self, params_tau1):
        f = SignalModel.gaussian([(1.0, 0.3, 1.0)])
        g = SignalModel.gaussian([(0.5j, -0.4, 0.0)])
        fg = SignalModel.gaussian([(1.0, 0.3, 1.0), (0.5j, -0.4, 0.0)])
        tf = forward_table(f, 1.0, 5, 8)
        tg = forward_table(g, 1.0, 5, 8)
        tfg = forward_table(fg, 1.0, 5, 8)
        coeffs = [coeff_E(m, params_tau1) for m in range(-5, 6)]
        for x in (-1.1, 0.6):
            a = reconstruct_point(x, tf, params_tau1, coeffs, 5, 8)
            b = reconstruct_point(x, tg, params_tau1, coeffs, 5, 8)
            c = reconstruct_point(x, tfg, params_tau1, coeffs, 5, 8)
            assert abs(c - (a + b)) <= 1e-10 * max(abs(c), 1.0)


class TestAutoTruncation:
    def test_tau1_orders(self, unit_gaussian, params_tau1):
        choice = auto_truncation(unit_gaussian, params_tau1, 1e-8, x_max=3.0)
        assert 4 <= choice.M <= 8
        assert choice.tail_estimate < 1e-8

    def test_supercritical_gate(self, unit_gaussian):
        with pytest.raises(RegimeError):
            auto_truncation(unit_gaussian, nome_from_tau(4.0), 1e-8)

    def test_near_critical_grows_but_terminates(self, unit_gaussian):
        params = nome_from_tau(0.99 * math.pi)
        choice = auto_truncation(unit_gaussian, params, 1e-8, x_max=1.0)
        base = auto_truncation(unit_gaussian, nome_from_tau(1.0), 1e-8, x_max=1.0)
        assert choice.M > base.M

    def test_zero_signal(self, params_tau1):
        zero = SignalModel.gaussian([(0.0, 0.0, 0.0)])
        choice = auto_truncation(zero, params_tau1, 1e-8)
        assert choice.tail_estimate == 0.0


class TestRoundTrip:
    def test_unit_gaussian_tau1(self, unit_gaussian):
        report = round_trip(unit_gaussian, 1.0,
                            ReconConfig(tol=1e-8, grid=(-3.0, 3.0, 0.05)))
        assert report.sup_error <= 1e-6
        assert report.l2_error <= report.sup_error * math.sqrt(len(report.xs)) + 1e-18

    def test_two_component_tau08(self, two_component):
        report = round_trip(two_component, 0.8,
                            ReconConfig(tol=1e-8, grid=(-3.0, 3.0, 0.05)))
        assert report.l2_error <= 1e-5

    def test_corpus_and_taus(self, unit_gaussian, two_component):
        corpus = [
            unit_gaussian,
            two_component,
            SignalModel.gaussian([(0.5 - 0.3j, 1.2, -1.0)]),
        ]
        for sig in corpus:
            for tau in (0.5, 1.0, 2.0, 0.8 * math.pi):
                report = round_trip(sig, tau, ReconConfig(tol=1e-8, grid=(-3.0, 3.0, 0.25)))
                assert report.sup_error <= max(1e-6, 100.0 * report.tail_estimate), (
                    sig, tau, report.sup_error)

    def test_monotone_truncation(self, unit_gaussian):
        errors = []
        for M in (3, 4, 5, 6):
            report = round_trip(unit_gaussian, 1.0,
                                ReconConfig(grid=(-3.0, 3.0, 0.25), truncation=(M, 9)))
            errors.append(report.sup_error)
        for earlier, later in zip(errors, errors[1:]):
            assert later <= earlier + 1e-10

    def test_translation_covariance(self, two_component):
        # table of f(. - a) reconstructs to the shifted evaluation of f
        for a in (0.5, 1.0):
            shifted = SignalModel.gaussian([
                (amp * complex(math.cos(-b * a), math.sin(-b * a)), c + a, b)
                for (amp, c, b) in [(1.0, 0.7, 2.0), (1.0, -1.0, 0.0)]
            ])
            report = round_trip(shifted, 0.8,
                                ReconConfig(tol=1e-8, grid=(-2.0, 3.0, 0.25)))
            reference = np.array([
                eval_signal(two_component, float(x) - a) for x in report.xs
            ])
            sup = np.max(np.abs(report.reconstructed - reference))
            assert sup <= 1e-6 * np.max(np.abs(reference))

    def test_degradation_toward_critical_wide_signal(self):
        """Fixed-truncation error grows toward the critical density.

        This needs a signal with slowly decaying spatial extent: for a
        lone narrow Gaussian the omitted-ring weight shrinks as tau
        grows (its aliased sums sit far below the frame-level envelope
        exp(tau^2 m^2)), and the round-trip error *improves* toward
        criticality.  Spreading components out restores the envelope
        and with it the advertised exp(-tau(pi - tau) M^2) degradation.
        """
        wide = SignalModel.gaussian(
            [(1.0, c, 0.0) for c in (-12.0, -6.0, 0.0, 6.0, 12.0)])
        errors = []
        for tau in (0.5 * math.pi, 0.8 * math.pi, 0.95 * math.pi):
            report = round_trip(wide, tau,
                                ReconConfig(grid=(-3.0, 3.0, 0.1), truncation=(2, 10)))
            errors.append(report.sup_error)
        assert errors[0] < errors[1] < errors[2]


class TestGridDriver:
    def test_modes_agree_with_residue_reuse(self, unit_gaussian, params_tau1):
        # span just over 2 pi: the residue classes genuinely repeat, and
        # every grid point still sits where the exterior sum is well
        # conditioned (far beyond |x| ~ pi the aliased images cancel many
        # digits deep and pointwise roundoff, not the mode, dominates)
        table = forward_table(unit_gaussian, 1.0, 5, 9)
        step = 2.0 * math.pi / 32
        base = dict(tol=1e-8, grid=(-math.pi - 0.3, math.pi + 0.3, step),
                    truncation=(5, 9))
        direct = reconstruct_grid(ReconConfig(mode="direct", **base), table, params_tau1)
        fourier = reconstruct_grid(ReconConfig(mode="fourier_grid", **base), table,
                                   params_tau1)
        assert len(direct.xs) > 32  # wraps: reuse actually happened
        scale = np.max(np.abs(direct.reconstructed))
        gap = np.max(np.abs(direct.reconstructed - fourier.reconstructed))
        assert gap <= 1e-10 * scale

    def test_fourier_mode_falls_back_on_irrational_step(self, unit_gaussian, params_tau1):
        table = forward_table(unit_gaussian, 1.0, 4, 8)
        cfg = ReconConfig(grid=(-1.0, 1.0, 0.1 * math.sqrt(2.0)), mode="fourier_grid",
                          truncation=(4, 8))
        report = reconstruct_grid(cfg, table, params_tau1, reference=unit_gaussian)
        assert report.sup_error <= 1e-8

    def test_empty_grid(self, unit_gaussian, params_tau1):
        table = forward_table(unit_gaussian, 1.0, 2, 2)
        cfg = ReconConfig(grid=(1.0, -1.0, 0.5), truncation=(2, 2))
        report = reconstruct_grid(cfg, table, params_tau1, reference=unit_gaussian)
        assert len(report.xs) == 0
        assert report.sup_error == 0.0

    def test_tau_mismatch_rejected(self, unit_gaussian):
        table = forward_table(unit_gaussian, 1.0, 2, 2)
        with pytest.raises(InvalidParameterError):
            reconstruct_grid(ReconConfig(truncation=(2, 2)), table, nome_from_tau(1.1))

    def test_threads_bitwise_identical(self, two_component, params_tau1):
        table = forward_table(two_component, 1.0, 4, 8)
        cfg = ReconConfig(grid=(-2.0, 2.0, 0.05), truncation=(4, 8))
        a = reconstruct_grid(cfg, table, params_tau1, threads=1)
        b = reconstruct_grid(cfg, table, params_tau1, threads=4)
        assert np.array_equal(a.reconstructed, b.reconstructed)

    def test_grid_points_deterministic(self):
        xs = grid_points((-3.0, 3.0, 0.05))
        assert len(xs) == 121
        assert xs[0] == -3.0
        assert xs[-1] == pytest.approx(3.0, abs=1e-12)

    def test_desk_scale_guard(self, unit_gaussian, params_tau1):
        table = forward_table(unit_gaussian, 1.0, 1, 1)
        cfg = ReconConfig(grid=(0.0, 1e6, 1e-2), truncation=(1, 1))
        with pytest.raises(InvalidParameterError, match="desk-scale"):
            reconstruct_grid(cfg, table, params_tau1)


def test_calibration_recovers_one_over_two_pi():
    fitted = calibrate_constant()
    assert fitted == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-8)
    assert RECONSTRUCTION_CONSTANT == pytest.approx(fitted, rel=1e-8)
