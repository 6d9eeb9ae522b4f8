"""Expected-error reports, bandwidth sweeps, and bandwidth selection."""

import io
import math

import numpy as np
import pytest

from bisr.factorization import (
    FactorizationKind,
    bisr,
    bsr,
    from_inverse_band,
    identity_factorization,
)
from bisr.metrics import (
    CSV_HEADER,
    b_frobenius_squared,
    bandwidth_grid,
    expected_error,
    rmse_bandwidth_sweep,
    select_bandwidth,
    write_sweep_csv,
)
from bisr.sensitivity import ParticipationSchema, sens_monotone_toeplitz
from bisr.toeplitz import r_sequence
from bisr.workload import WorkloadParams, workload_coeffs

from conftest import FIGURE_SETTINGS


class TestExpectedError:
    def test_identity_prefix_sum(self):
        params = WorkloadParams(7, 1.0, 0.0)
        rep = expected_error(
            identity_factorization(params), ParticipationSchema(7, 7, 1)
        )
        assert rep.b_frobenius_sq == pytest.approx(28.0)
        assert rep.sensitivity == pytest.approx(1.0)
        assert rep.rmse == pytest.approx(2.0)
        assert rep.noise_scale == rep.sensitivity
        assert not rep.majorized

    def test_full_square_root_by_direct_summation(self):
        n = 64
        params = WorkloadParams(n, 1.0, 0.0)
        rep = expected_error(bisr(params, n), ParticipationSchema(n, n, 1))
        r = r_sequence(n)
        weights = n - np.arange(n)
        want = math.sqrt(float(weights @ (r * r)) / n) * math.sqrt(float(r @ r))
        assert rep.rmse == pytest.approx(want, rel=1e-9)

    def test_two_band_strategy_scaling(self):
        n = 256
        lam = math.sqrt(1.0 - 1.0 / math.sqrt(n))
        f = from_inverse_band(WorkloadParams(n, 1.0, 0.0), [1.0, -lam])
        rep = expected_error(f, ParticipationSchema(n, n, 1))
        assert rep.rmse <= 2.0 * n**0.25

    def test_report_identity_relation(self):
        params = WorkloadParams(50, 0.999, 0.5)
        schema = ParticipationSchema(50, 10, 3)
        rep = expected_error(bisr(params, 8), schema)
        assert rep.rmse == pytest.approx(
            rep.sensitivity * math.sqrt(rep.b_frobenius_sq / 50), rel=1e-12
        )

    def test_rejects_mismatched_schema(self):
        with pytest.raises(ValueError):
            expected_error(
                bisr(WorkloadParams(8, 1.0, 0.0), 2), ParticipationSchema(9, 3, 2)
            )

    def test_majorization_flag_for_optimized_kind(self):
        # A band whose inverse is non-monotone: tiny first tap, large second.
        f = from_inverse_band(WorkloadParams(16, 1.0, 0.0), [1.0, -0.05, -0.8])
        schema = ParticipationSchema(16, 8, 2)
        rep = expected_error(f, schema)
        assert rep.majorized
        env_sens = sens_monotone_toeplitz(f.c_coeffs, schema, majorize=True)
        assert rep.sensitivity == pytest.approx(env_sens)

    def test_frobenius_weights(self):
        assert b_frobenius_squared([2.0, 1.0, 1.0]) == pytest.approx(
            3 * 4 + 2 * 1 + 1 * 1
        )


class TestSweep:
    def test_reports_sorted_and_finite(self):
        params = WorkloadParams(1024, 1.0, 0.0)
        schema = ParticipationSchema(1024, 128, 8)
        grid = [2**i for i in range(11)]
        reps = rmse_bandwidth_sweep(params, schema, FactorizationKind.BISR, grid)
        assert [r.bandwidth for r in reps] == sorted(grid)
        assert all(np.isfinite(r.rmse) and r.rmse > 0 for r in reps)

    def test_rejects_empty_grid(self):
        with pytest.raises(ValueError):
            rmse_bandwidth_sweep(
                WorkloadParams(8, 1.0, 0.0),
                ParticipationSchema(8, 4, 2),
                FactorizationKind.BISR,
                [],
            )

    def test_rejects_identity_kind(self):
        with pytest.raises(ValueError):
            rmse_bandwidth_sweep(
                WorkloadParams(8, 1.0, 0.0),
                ParticipationSchema(8, 4, 2),
                FactorizationKind.IDENTITY,
                [1, 2],
            )

    def test_csv_format(self):
        params = WorkloadParams(16, 1.0, 0.0)
        schema = ParticipationSchema(16, 4, 4)
        reps = rmse_bandwidth_sweep(params, schema, FactorizationKind.BSR, [1, 4])
        out = io.StringIO()
        write_sweep_csv(params, reps, out)
        lines = out.getvalue().strip().split("\n")
        assert lines[0] == CSV_HEADER
        assert len(lines) == 3
        first = lines[1].split(",")
        assert first[0] == "bsr"
        assert first[1] == "16"
        assert first[6] == "1"
        float(first[9])


class TestSelectBandwidth:
    def test_grid_contents(self):
        grid = bandwidth_grid(1024, 128)
        assert 1 in grid and 1024 in grid
        assert 128 in grid
        assert math.ceil(128 * math.log(128)) in grid

    def test_grid_caps_at_n(self):
        assert max(bandwidth_grid(64, 64)) == 64

    def test_minimizes_over_grid(self):
        params = WorkloadParams(1024, 1.0, 0.0)
        schema = ParticipationSchema(1024, 128, 8)
        p_star = select_bandwidth(params, schema)
        reps = rmse_bandwidth_sweep(
            params, schema, FactorizationKind.BISR, bandwidth_grid(1024, 128)
        )
        best = min(r.rmse for r in reps)
        chosen = next(r for r in reps if r.bandwidth == p_star)
        assert chosen.rmse == best

    def test_single_participation_includes_full_bandwidth(self):
        params = WorkloadParams(64, 1.0, 0.0)
        schema = ParticipationSchema(64, 64, 1)
        assert 64 in bandwidth_grid(64, 64)
        p_star = select_bandwidth(params, schema)
        full = expected_error(bisr(params, 64), schema).rmse
        chosen = expected_error(bisr(params, p_star), schema).rmse
        assert chosen <= full + 1e-12

    def test_selection_stays_below_blog_b(self):
        params = WorkloadParams(4096, 1.0, 0.0)
        schema = ParticipationSchema(4096, 256, 16)
        assert select_bandwidth(params, schema) <= math.ceil(256 * math.log(256))


class TestErrorOrdering:
    def test_every_factorization_dominates_workload_pattern_norm(self):
        """Measured error is never below the workload's own pattern norm."""
        n, k = 512, 4
        b = n // k
        schema = ParticipationSchema(n, b, k)
        for beta in (0.0, 0.9):
            params = WorkloadParams(n, 1.0, beta)
            floor = sens_monotone_toeplitz(workload_coeffs(params), schema)
            floor /= math.sqrt(n)
            for f in (
                bisr(params, 16),
                bsr(params, b),
                identity_factorization(params),
            ):
                assert expected_error(f, schema).rmse >= floor - 1e-9

    def test_banded_inverse_tracks_banded_root_at_scale(self):
        """At the largest desk sizes the two banded families stay close."""
        for alpha, beta in FIGURE_SETTINGS:
            n, k = 1024, 16
            b = n // k
            params = WorkloadParams(n, alpha, beta)
            schema = ParticipationSchema(n, b, k)
            inv_based = expected_error(
                bisr(params, select_bandwidth(params, schema)), schema
            ).rmse
            root_based = expected_error(bsr(params, b), schema).rmse
            assert inv_based <= 1.05 * root_based
