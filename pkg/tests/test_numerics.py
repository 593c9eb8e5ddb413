import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starres.errors import ValidationError
from starres.numerics import (
    eigvalsh,
    geometric_mean,
    minimize_1d,
    project_onto_polytope,
    project_onto_simplex,
    trace_distance,
)

K = 7.0 - 3.0 * np.sqrt(5.0)


class TestEigvalsh:
    def test_identity(self):
        assert np.allclose(eigvalsh(np.eye(4)), [1, 1, 1, 1])

    def test_pauli_x(self):
        assert np.allclose(eigvalsh(np.array([[0, 1], [1, 0]])), [-1, 1])

    def test_symmetric_2x2(self):
        assert np.allclose(eigvalsh(np.array([[2, 1], [1, 2]])), [1, 3])

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValidationError):
            eigvalsh(np.array([[0, 1], [0, 0]]))

    def test_trace_and_frobenius_invariants(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            n = rng.integers(2, 5)
            A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            H = A + A.conj().T
            lam = eigvalsh(H)
            assert abs(lam.sum() - np.trace(H).real) < 1e-10 * max(1, abs(np.trace(H)))
            assert abs((lam**2).sum() - np.linalg.norm(H) ** 2) < 1e-9 * max(1, np.linalg.norm(H) ** 2)

    def test_matches_numpy(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            H = A + A.conj().T
            assert np.allclose(eigvalsh(H), np.linalg.eigvalsh(H), atol=1e-10)


class TestTraceDistance:
    def test_equal_states(self):
        rho = np.eye(2) / 2
        assert trace_distance(rho, rho) == 0.0

    def test_orthogonal_pure_states(self):
        k0 = np.diag([1.0, 0.0])
        k1 = np.diag([0.0, 1.0])
        assert trace_distance(k0, k1) == pytest.approx(1.0)

    def test_pure_vs_mixed(self):
        assert trace_distance(np.diag([1.0, 0.0]), np.eye(2) / 2) == pytest.approx(0.5)

    def test_dim_mismatch(self):
        with pytest.raises(ValidationError):
            trace_distance(np.eye(2) / 2, np.eye(4) / 4)

    def test_symmetry_and_triangle(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            rhos = []
            for _ in range(3):
                A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
                H = A @ A.conj().T
                rhos.append(H / np.trace(H).real)
            d01 = trace_distance(rhos[0], rhos[1])
            d10 = trace_distance(rhos[1], rhos[0])
            d12 = trace_distance(rhos[1], rhos[2])
            d02 = trace_distance(rhos[0], rhos[2])
            assert abs(d01 - d10) < 1e-10
            assert d02 <= d01 + d12 + 1e-10


class TestGeometricMean:
    def test_examples(self):
        assert geometric_mean([0.5, 0.5]) == 0.5
        assert geometric_mean([1, 4]) == pytest.approx(2.0)
        assert geometric_mean([0.3, 0]) == 0.0

    def test_negative_rejected(self):
        with pytest.raises(ValidationError):
            geometric_mean([1.0, -0.1])

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            geometric_mean([])

    @given(st.floats(min_value=1e-6, max_value=1e6), st.integers(min_value=1, max_value=7))
    def test_constant_exact(self, c, m):
        assert geometric_mean([c] * m) == c

    @given(
        st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=2, max_size=6),
        st.integers(min_value=0, max_value=5),
        st.floats(min_value=0.0, max_value=5.0),
    )
    def test_monotone_in_each_argument(self, vals, idx, bump):
        idx = idx % len(vals)
        bumped = list(vals)
        bumped[idx] = bumped[idx] + bump
        assert geometric_mean(bumped) >= geometric_mean(vals) - 1e-12


class TestMinimize1d:
    def test_quadratic(self):
        x, f = minimize_1d(lambda q: (q - 0.3) ** 2, 0.0, 1.0, tol=1e-10)
        assert abs(x - 0.3) < 1e-8
        assert f < 1e-15

    def test_piecewise_linear_kkt_objective(self):
        # the slack-variable objective with kinks at K/4 and K
        def f(q):
            return (0.5 * abs(K - 4 * q) + abs(-K + q) + 0.5 * abs(K + 2 * q)) / 12.0

        x, val = minimize_1d(f, 0.0, 1.0, tol=1e-10)
        assert abs(x - K / 4) < 1e-8
        assert abs(val - K / 8) < 1e-10

    def test_constant(self):
        x, f = minimize_1d(lambda q: 2.5, 0.0, 1.0, tol=1e-8)
        assert 0.0 <= x <= 1.0
        assert f == 2.5

    def test_bad_interval(self):
        with pytest.raises(ValidationError):
            minimize_1d(lambda q: q, 1.0, 1.0)


class TestSimplexProjection:
    @given(st.lists(st.floats(min_value=-5, max_value=5), min_size=2, max_size=6))
    def test_output_on_simplex(self, w):
        out = project_onto_simplex(np.asarray(w))
        assert np.all(out >= 0)
        assert abs(out.sum() - 1.0) < 1e-9


class TestProjectOntoPolytope:
    def test_segment(self):
        pt, d = project_onto_polytope(np.array([2.0, 0.0]), np.array([[0.0, 0.0], [1.0, 0.0]]), "L2")
        assert d == pytest.approx(1.0, abs=1e-9)
        assert np.allclose(pt, [1.0, 0.0], atol=1e-8)

    def test_inside(self):
        _, d = project_onto_polytope(np.array([0.2, 0.2]), np.array([[0, 0], [1, 0], [0, 1.0]]), "L2")
        assert d < 1e-8

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            project_onto_polytope(np.zeros(2), np.zeros((0, 2)))

    def test_tc_face_tv_value(self):
        # the corner-polytope face of the total-correlation free set
        p = np.array([9 / 16, 3 / 16, 3 / 16, 1 / 16])
        face = np.array([
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0.25, 0.25, 0.25, 0.25],
        ], dtype=float)
        _, d = project_onto_polytope(p, face, "TV")
        assert d == pytest.approx(1 / 16, abs=1e-7)

    @settings(deadline=None, max_examples=20)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_matches_barycentric_grid(self, seed):
        rng = np.random.default_rng(seed)
        V = rng.normal(size=(3, 3))
        p = rng.normal(size=3)
        _, d = project_onto_polytope(p, V, "L2")
        best = np.inf
        steps = np.arange(0.0, 1.0001, 0.01)
        for a in steps:
            for b in steps[steps <= 1.0001 - a]:
                x = a * V[0] + b * V[1] + (1 - a - b) * V[2]
                best = min(best, float(np.linalg.norm(x - p)))
        assert abs(best - d) < 2e-2
