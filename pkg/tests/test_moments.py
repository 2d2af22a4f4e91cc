import json
import math

import numpy as np
import pytest

import bergmanlab as bl
from bergmanlab.moments import (
    GramMatrix,
    describe_weight,
    quadrature_points_1d,
    repair_psd,
)

DISK = bl.unit_disk()
C1 = bl.full_space(1)


def scale_matrix(G):
    """Natural per-entry scale sqrt(G_aa G_bb): quadrature errors and
    off-diagonal leakage are meaningful relative to it, not absolutely,
    because Gaussian moments span many orders of magnitude."""
    d = np.sqrt(np.abs(np.real(np.diag(G))))
    return np.outer(d, d)


class TestMomentExact:
    def test_gaussian_fourth_moment(self):
        got = bl.moment_exact(C1, bl.gaussian_weight(1, 1.0), (2,), (2,))
        assert got == pytest.approx(2 * math.pi, rel=1e-15)

    @pytest.mark.parametrize("k", range(6))
    def test_disk_beta_moments(self, k):
        got = bl.moment_exact(DISK, bl.generic_norm_weight(DISK, 1.0), (k,), (k,))
        assert got.real == pytest.approx(math.pi / ((k + 1) * (k + 2)), rel=1e-14)

    def test_ball_moment(self):
        b2 = bl.unit_ball(2)
        got = bl.moment_exact(b2, bl.generic_norm_weight(b2, 1.0), (1, 0), (1, 0))
        assert got.real == pytest.approx(math.pi ** 2 / 24, rel=1e-14)

    def test_radial_weights_have_zero_cross_moments(self):
        got = bl.moment_exact(DISK, bl.generic_norm_weight(DISK, 2.0), (1,), (3,))
        assert got == 0

    def test_polynomial_matches_norm_power_for_integer_exponent(self):
        poly = bl.polynomial_weight(DISK, [1.0, -2.0, 1.0])  # (1 - t)^2
        power = bl.generic_norm_weight(DISK, 2.0)
        for k in range(8):
            a = bl.moment_exact(DISK, poly, (k,), (k,))
            b = bl.moment_exact(DISK, power, (k,), (k,))
            assert a == pytest.approx(b, rel=1e-14)

    def test_unsupported_pairs_raise(self):
        with pytest.raises(ValueError):
            bl.moment_exact(DISK, bl.gaussian_weight(1, 1.0), (0,), (0,))
        prof = bl.Weight(DISK, bl.RadialProfile((0, 0.5, 1.0, 1.5),
                                                (1, 1, 1, 1)))
        with pytest.raises(ValueError):
            bl.moment_exact(DISK, prof, (0,), (0,))


class TestGramQuadrature:
    @pytest.mark.parametrize("domain,weight", [
        (DISK, bl.generic_norm_weight(DISK, 1.0)),
        (DISK, bl.generic_norm_weight(DISK, 2.0)),
        (DISK, bl.polynomial_weight(DISK, [1.0, -1.0]).pow(2)),
        (C1, bl.gaussian_weight(1, 1.0)),
        (C1, bl.gaussian_weight(1, 2.0)),
    ])
    def test_matches_exact_moments(self, domain, weight):
        Gq = bl.gram_quadrature(domain, weight, 10)
        Ge = bl.gram_exact(domain, weight, 10)
        defect = np.abs(Gq.entries - Ge.entries) / (1.0 + scale_matrix(Ge.entries))
        assert defect.max() <= 1e-12

    def test_ball_two_dimensional(self):
        b2 = bl.unit_ball(2)
        w = bl.generic_norm_weight(b2, 1.0)
        Gq = bl.gram_quadrature(b2, w, 6)
        Ge = bl.gram_exact(b2, w, 6)
        defect = np.abs(Gq.entries - Ge.entries) / (1.0 + scale_matrix(Ge.entries))
        assert defect.max() <= 1e-12

    def test_unit_weight_degree_zero_gives_area(self):
        G = bl.gram_quadrature(DISK, bl.polynomial_weight(DISK, [1.0]), 0)
        assert G.entries[0, 0].real == pytest.approx(math.pi, rel=1e-14)

    def test_gaussian_mass(self):
        G = bl.gram_quadrature(C1, bl.gaussian_weight(1, 1.0), 6)
        assert abs(G.entries[0, 0] - math.pi) <= 1e-12 * math.pi

    def test_hermitian_as_stored(self):
        G = bl.gram_quadrature(DISK, bl.generic_norm_weight(DISK, 1.0), 8)
        assert np.array_equal(G.entries, G.entries.conj().T)

    def test_radial_sparsity(self):
        G = bl.gram_quadrature(DISK, bl.generic_norm_weight(DISK, 1.0), 10)
        off = np.abs(G.entries - np.diag(np.diag(G.entries)))
        assert off.max() <= 1e-12
        Gg = bl.gram_quadrature(C1, bl.gaussian_weight(1, 1.0), 10)
        rel = np.abs(Gg.entries - np.diag(np.diag(Gg.entries)))
        rel = rel / scale_matrix(Gg.entries)
        assert rel.max() <= 1e-12

    def test_gram_scales_linearly_in_weight(self):
        w = bl.generic_norm_weight(DISK, 1.0)
        G1 = bl.gram_quadrature(DISK, w, 6).entries
        G2 = bl.gram_quadrature(DISK, w.scaled(3.5), 6).entries
        assert np.max(np.abs(G2 - 3.5 * G1)) <= 1e-14 * np.max(np.abs(G2))

    def test_type_i_unsupported(self):
        dom = bl.matrix_ball(2, 2)
        with pytest.raises(ValueError, match="quadrature"):
            bl.gram_quadrature(dom, bl.generic_norm_weight(dom, 1.0), 2)

    def test_nondecaying_fullspace_table_rejected(self):
        knots = tuple(np.linspace(0.0, 10.0, 50))
        prof = bl.RadialProfile(knots, tuple(1.0 for _ in knots))
        w = bl.Weight(C1, prof)
        with pytest.raises(ValueError, match="tail"):
            bl.gram_quadrature(C1, w, 4)

    def test_quadrature_points_match_gram_mass(self):
        w = bl.generic_norm_weight(DISK, 1.0)
        pts, wq = quadrature_points_1d(DISK, w, 4)
        from bergmanlab.core import weight_radial_fn
        mass = np.sum(wq * weight_radial_fn(w)(np.abs(pts) ** 2))
        assert mass == pytest.approx(math.pi / 2, rel=1e-13)


class TestGramMonteCarlo:
    def test_disk_area_within_three_se(self):
        G = bl.gram_montecarlo(DISK, bl.polynomial_weight(DISK, [1.0]), 0,
                               10 ** 6, seed=42)
        err = abs(G.entries[0, 0].real - math.pi)
        assert err <= max(3 * G.stderr[0, 0], 1e-12)

    def test_radial_offdiagonals_within_three_se(self):
        G = bl.gram_montecarlo(DISK, bl.generic_norm_weight(DISK, 1.0), 2,
                               10 ** 6, seed=7)
        B = G.size
        for i in range(B):
            for j in range(B):
                if i != j:
                    assert abs(G.entries[i, j]) <= 3 * G.stderr[i, j] + 1e-12

    def test_gaussian_second_moment(self):
        G = bl.gram_montecarlo(C1, bl.gaussian_weight(1, 2.0), 2, 10 ** 6,
                               seed=3)
        err = abs(G.entries[1, 1].real - math.pi / 4)
        assert err <= 3 * G.stderr[1, 1]

    def test_standard_error_scales_like_sqrt_n(self):
        w = bl.generic_norm_weight(DISK, 1.0)
        se1 = bl.gram_montecarlo(DISK, w, 2, 200_000, seed=11).stderr
        se2 = bl.gram_montecarlo(DISK, w, 2, 400_000, seed=12).stderr
        ratio = np.mean(se1 / se2)
        assert abs(ratio - math.sqrt(2)) <= 0.1 * math.sqrt(2)

    def test_deterministic_given_seed(self):
        a = bl.gram_montecarlo(DISK, bl.generic_norm_weight(DISK, 1.0), 2,
                               50_000, seed=9)
        b = bl.gram_montecarlo(DISK, bl.generic_norm_weight(DISK, 1.0), 2,
                               50_000, seed=9)
        assert np.array_equal(a.entries, b.entries)
        assert np.array_equal(a.stderr, b.stderr)


class TestGramValidate:
    def test_exact_disk_gram_clean(self):
        diag = bl.gram_validate(bl.gram_exact(DISK, bl.generic_norm_weight(DISK, 1.0), 4))
        assert diag.hermitian_defect == 0.0
        assert diag.lambda_min > 0
        assert diag.cholesky_ok
        assert diag.radial_offdiag_max == 0.0

    def test_identity_condition_one(self):
        basis = bl.multiindex_enumerate(1, 2)
        G = GramMatrix(DISK, 2, basis, np.eye(3, dtype=complex), {"kind": "exact"})
        diag = bl.gram_validate(G)
        assert diag.condition == pytest.approx(1.0)

    def test_degree_30_gaussian_condition_finite(self):
        G = bl.gram_exact(C1, bl.gaussian_weight(1, 1.0), 30)
        diag = bl.gram_validate(G)
        assert 1.0 < diag.condition < math.inf
        assert diag.cholesky_ok

    def test_repair_psd_clips_small_negatives(self):
        M = np.diag([1.0, 1e-12]).astype(complex)
        M[0, 1] = M[1, 0] = 1.001e-6  # makes lambda_min slightly negative
        fixed, pert = repair_psd(M, psd_tol=1e-10)
        assert pert > 0
        assert np.linalg.eigvalsh(fixed)[0] >= -1e-18

    def test_repair_psd_rejects_indefinite(self):
        with pytest.raises(ValueError, match="indefinite"):
            repair_psd(np.diag([1.0, -0.5]).astype(complex))


class TestSerialization:
    def test_gram_round_trip(self):
        G = bl.gram_quadrature(DISK, bl.generic_norm_weight(DISK, 1.0), 6)
        text = json.dumps(bl.gram_to_json(G))
        G2 = bl.gram_from_json(json.loads(text))
        assert np.array_equal(G.entries, G2.entries)
        assert G2.degree == G.degree
        assert G2.domain == G.domain

    def test_montecarlo_round_trip_keeps_stderr(self):
        G = bl.gram_montecarlo(DISK, bl.polynomial_weight(DISK, [1.0]), 1,
                               10_000, seed=1)
        G2 = bl.gram_from_json(bl.gram_to_json(G))
        assert np.array_equal(G.stderr, G2.stderr)
        assert G2.method["seed"] == 1

    def test_weight_description(self):
        w = bl.gaussian_weight(2, 1.5).pow(2).scaled(0.5)
        assert "exp" in describe_weight(w)


class TestMass:
    def test_weight_mass_exact(self):
        assert bl.weight_mass(bl.generic_norm_weight(DISK, 1.0)) == pytest.approx(
            math.pi / 2, rel=1e-14)

    def test_weight_mass_quadrature_fallback(self):
        knots = np.linspace(0.0, 1.2, 25)
        prof = bl.RadialProfile(tuple(knots), tuple(np.exp(-knots)))
        w = bl.Weight(DISK, prof)
        got = bl.weight_mass(w)
        from scipy.integrate import quad
        ref = math.pi * quad(lambda t: math.exp(-t), 0, 1)[0]
        assert got == pytest.approx(ref, rel=1e-6)

    def test_unit_mass(self):
        w = bl.unit_mass_weight(bl.generic_norm_weight(DISK, 2.0))
        assert bl.weight_mass(w) == pytest.approx(1.0, rel=1e-13)
