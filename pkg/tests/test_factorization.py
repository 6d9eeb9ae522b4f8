"""Factorization assembly, its exactness invariants, and JSON interchange."""

import numpy as np
import pytest

from bisr.factorization import (
    FactorizationKind,
    bisr,
    bsr,
    from_inverse_band,
    from_json,
    identity_factorization,
    to_json,
)
from bisr.toeplitz import ltt_mul, r_sequence
from bisr.workload import WorkloadParams, sqrt_coeffs, workload_coeffs

from conftest import ALPHA_BETA_GRID


def _impulse(n):
    e = np.zeros(n)
    e[0] = 1.0
    return e


class TestBisr:
    def test_full_bandwidth_collapses_to_square_root(self):
        params = WorkloadParams(64, 0.999, 0.5)
        f = bisr(params, 64)
        c = sqrt_coeffs(params)
        np.testing.assert_allclose(f.c_coeffs, c, rtol=1e-9, atol=1e-12)
        np.testing.assert_allclose(f.b_coeffs, c, rtol=1e-9, atol=1e-12)

    def test_single_band_is_identity_strategy(self):
        params = WorkloadParams(16, 1.0, 0.5)
        f = bisr(params, 1)
        np.testing.assert_array_equal(f.c_inv_band, [1.0])
        np.testing.assert_allclose(f.c_coeffs, _impulse(16), atol=1e-15)
        np.testing.assert_allclose(f.b_coeffs, workload_coeffs(params), atol=1e-12)

    def test_prefix_sum_band_values(self):
        f = bisr(WorkloadParams(6, 1.0, 0.0), 3)
        np.testing.assert_array_equal(f.c_inv_band, [1.0, -0.5, -0.125])

    @pytest.mark.parametrize("p", [0, 7])
    def test_rejects_bad_bandwidth(self, p):
        with pytest.raises(ValueError):
            bisr(WorkloadParams(6, 1.0, 0.0), p)

    @pytest.mark.parametrize("alpha,beta", ALPHA_BETA_GRID)
    def test_first_p_strategy_values_match_square_root(self, alpha, beta):
        params = WorkloadParams(256, alpha, beta)
        f = bisr(params, 32)
        np.testing.assert_allclose(
            f.c_coeffs[:32], sqrt_coeffs(params)[:32], rtol=1e-12, atol=1e-14
        )


class TestBsr:
    def test_full_bandwidth_prefix_sum(self):
        f = bsr(WorkloadParams(8, 1.0, 0.0), 8)
        np.testing.assert_allclose(f.c_coeffs, r_sequence(8), atol=1e-15)
        np.testing.assert_allclose(f.b_coeffs, r_sequence(8), rtol=1e-10)

    def test_single_band_is_identity_strategy(self):
        params = WorkloadParams(8, 1.0, 0.0)
        f = bsr(params, 1)
        np.testing.assert_allclose(f.b_coeffs, workload_coeffs(params), atol=1e-12)

    def test_two_bands_prefix_sum(self):
        f = bsr(WorkloadParams(4, 1.0, 0.0), 2)
        np.testing.assert_array_equal(f.c_coeffs, [1.0, 0.5, 0.0, 0.0])
        np.testing.assert_allclose(
            ltt_mul(f.b_coeffs, f.c_coeffs, 4), [1, 1, 1, 1], atol=1e-12
        )

    def test_stored_inverse_is_full_length(self):
        f = bsr(WorkloadParams(32, 1.0, 0.0), 4)
        assert f.c_inv_band.size == 32
        np.testing.assert_allclose(
            ltt_mul(f.c_coeffs, f.c_inv_band, 32), _impulse(32), atol=1e-10
        )


class TestIdentity:
    def test_exact_factorization(self):
        params = WorkloadParams(4, 1.0, 0.0)
        f = identity_factorization(params)
        np.testing.assert_array_equal(f.b_coeffs, [1, 1, 1, 1])
        np.testing.assert_array_equal(
            ltt_mul(f.b_coeffs, f.c_coeffs, 4), workload_coeffs(params)
        )
        assert f.kind is FactorizationKind.IDENTITY


class TestFromInverseBand:
    def test_unit_band_is_identity(self):
        params = WorkloadParams(8, 1.0, 0.0)
        f = from_inverse_band(params, [1.0])
        np.testing.assert_allclose(f.c_coeffs, _impulse(8), atol=1e-15)
        np.testing.assert_allclose(f.b_coeffs, workload_coeffs(params), atol=1e-12)
        assert f.kind is FactorizationKind.OPTIMIZED

    def test_two_band_geometric_strategy(self):
        lam = 0.5
        f = from_inverse_band(WorkloadParams(6, 1.0, 0.0), [1.0, -lam])
        np.testing.assert_allclose(f.c_coeffs, lam ** np.arange(6), atol=1e-14)
        want_b = np.full(6, 1.0 - lam)
        want_b[0] = 1.0
        np.testing.assert_allclose(f.b_coeffs, want_b, atol=1e-14)

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            from_inverse_band(WorkloadParams(4, 1.0, 0.0), [2.0, -0.5])


class TestExactness:
    @pytest.mark.parametrize("alpha,beta", ALPHA_BETA_GRID)
    @pytest.mark.parametrize("p", [1, 2, 13, 64, 256])
    def test_product_reproduces_workload(self, alpha, beta, p):
        n = 256
        params = WorkloadParams(n, alpha, beta)
        want = workload_coeffs(params)
        for f in (bisr(params, p), bsr(params, p)):
            np.testing.assert_allclose(
                ltt_mul(f.b_coeffs, f.c_coeffs, n), want, atol=1e-8
            )

    def test_large_problem(self):
        n = 4096
        params = WorkloadParams(n, 1.0, 0.9)
        f = bisr(params, 64)
        np.testing.assert_allclose(
            ltt_mul(f.b_coeffs, f.c_coeffs, n), workload_coeffs(params), atol=1e-8
        )
        e = ltt_mul(f.c_coeffs, f.c_inv_band, n)
        np.testing.assert_allclose(e, _impulse(n), atol=1e-9)


class TestStrategyCoefficientBounds:
    """Shape of the re-inverted strategy matrix beyond the band."""

    @pytest.mark.parametrize("alpha,beta", ALPHA_BETA_GRID)
    @pytest.mark.parametrize("p", [2, 8, 32])
    def test_positive_and_non_increasing(self, alpha, beta, p):
        f = bisr(WorkloadParams(1024, alpha, beta), p)
        c = f.c_coeffs
        assert np.all(c > -1e-15)
        assert np.all(np.diff(c) <= 1e-15)

    @pytest.mark.parametrize("alpha,beta", ALPHA_BETA_GRID)
    @pytest.mark.parametrize("p", [2, 8, 32])
    def test_tail_bounded_by_geometric_envelope(self, alpha, beta, p):
        n = 1024
        f = bisr(WorkloadParams(n, alpha, beta), p)
        ratio = beta / alpha
        reduced = sqrt_coeffs(WorkloadParams(n, 1.0, ratio))
        gamma = 1.0 / (1.0 + (1.0 - ratio) ** 2 / (4.0 * p * (1.0 + ratio)))
        i = np.arange(p, n)
        cap = np.minimum(reduced[p:], reduced[p] * gamma ** (i - p))
        bound = alpha**i * cap
        tail = f.c_coeffs[p:]
        assert np.all(tail >= -1e-15)
        assert np.all(tail <= bound + 1e-12)

    @pytest.mark.parametrize("alpha,beta", ALPHA_BETA_GRID)
    @pytest.mark.parametrize("p", [2, 8, 32])
    def test_postprocessing_tail_bounded(self, alpha, beta, p):
        n = 1024
        f = bisr(WorkloadParams(n, alpha, beta), p)
        reduced = sqrt_coeffs(WorkloadParams(n, 1.0, beta / alpha))
        i = np.arange(p, n)
        bound = alpha**i * reduced[p - 1]
        tail = f.b_coeffs[p:]
        assert np.all(tail >= -1e-12)
        assert np.all(tail <= bound + 1e-12)


class TestJson:
    def test_round_trip_exact(self):
        f = bisr(WorkloadParams(40, 0.999, 0.5), 6)
        g = from_json(to_json(f))
        assert g.kind is f.kind
        assert g.bandwidth == f.bandwidth
        assert g.params == f.params
        np.testing.assert_array_equal(g.c_inv_band, f.c_inv_band)
        np.testing.assert_array_equal(g.c_coeffs, f.c_coeffs)
        np.testing.assert_array_equal(g.b_coeffs, f.b_coeffs)

    def test_document_fields(self):
        import json

        doc = json.loads(to_json(bsr(WorkloadParams(5, 1.0, 0.0), 2)))
        assert set(doc) == {
            "kind", "n", "alpha", "beta", "p",
            "c_inv_band", "c_coeffs", "b_coeffs",
        }
        assert doc["kind"] == "bsr"
        assert doc["p"] == 2
        assert len(doc["c_coeffs"]) == 5
