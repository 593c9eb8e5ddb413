import numpy as np
import pytest

from starres import discord
from starres.core import cone_contains, g_monotone, monotone_bounds, shrink_to_kernel, validate_fortress
from starres.discord import (
    FREE_OP_KINDS,
    UVCoordinates,
    bell_diagonal_quantifier,
    bell_grid,
    discord_free_op,
    discord_quantifier,
    discord_theory,
    quantifier_via_engine,
    to_uv,
    uv_to_fano,
)
from starres.errors import UnsupportedInputError, ValidationError
from starres.quantum import TwoQubitFano, fano_positivity, zero_discord_check
from conftest import random_bell_diagonal, random_diagonal_state

SQRT2 = np.sqrt(2.0)


def diag_state(t, x=None, y=None):
    return TwoQubitFano(
        x=np.zeros(3) if x is None else x,
        y=np.zeros(3) if y is None else y,
        T=np.diag(t),
    )


class TestUV:
    def test_zero(self):
        uv = to_uv(diag_state([0, 0, 0]))
        assert np.allclose(uv.u, 0) and np.allclose(uv.v, 0)

    def test_x_equals_t(self):
        uv = to_uv(diag_state([1, 0, 0], x=[1, 0, 0]))
        assert uv.u[0] == pytest.approx(SQRT2)
        assert uv.v[0] == pytest.approx(0.0)

    def test_bell_diagonal_pattern(self):
        t = np.array([-0.3, 0.5, 0.1])
        uv = to_uv(diag_state(t))
        assert np.allclose(uv.u, t / SQRT2)
        assert np.allclose(uv.v, -t / SQRT2)

    def test_round_trip(self, rng):
        for _ in range(100):
            s = random_diagonal_state(rng)
            back = uv_to_fano(to_uv(s))
            assert np.allclose(back.x, s.x, atol=1e-12)
            assert np.allclose(back.T, s.T, atol=1e-12)
            assert np.allclose(back.y, s.y, atol=1e-12)

    def test_requires_diagonal(self):
        s = TwoQubitFano(x=np.zeros(3), y=np.zeros(3), T=np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]]) * 0.1)
        with pytest.raises(UnsupportedInputError):
            to_uv(s)


class TestTheory:
    def test_sixty_four_cones_three_sections(self):
        th = discord_theory(np.zeros(3))
        assert len(th.domains) == 64
        assert all(len(d.sections) == 3 for d in th.domains)

    def test_rectangles_are_squares_at_y_zero(self):
        th = discord_theory(np.zeros(3))
        for dom in th.domains:
            for sec in dom.sections:
                assert np.allclose(sec.params["half_widths"], 1 / (2 * SQRT2))

    def test_rectangle_bounds_follow_y(self):
        y = np.array([0.5, -0.25, 0.0])
        th = discord_theory(y)
        sec = th.domains[0].sections[0]
        assert 2 * sec.params["half_widths"][0] == pytest.approx((1 + y[0]) / SQRT2)
        assert 2 * sec.params["half_widths"][1] == pytest.approx((1 - y[0]) / SQRT2)

    def test_kernel_inside_every_section(self):
        th = discord_theory(np.zeros(3))
        origin = np.zeros(6)
        for dom in th.domains:
            for sec in dom.sections:
                assert sec.distance(origin) < 1e-12

    def test_invalid_y(self):
        with pytest.raises(ValidationError):
            discord_theory([1.5, 0, 0])


class TestQuantifier:
    def test_single_axis_state_is_free(self):
        rep = discord_quantifier(diag_state([0.4, 0, 0], x=[0.2, 0, 0]))
        assert rep.value == 0.0

    def test_bell_diagonal_half(self):
        rep = discord_quantifier(diag_state([-0.5, -0.5, -0.5]))
        assert rep.value == pytest.approx(1 / SQRT2)
        assert rep.per_section == pytest.approx([np.sqrt(0.5)] * 3)

    def test_bell_vertex(self):
        rep = discord_quantifier(diag_state([1, 1, -1]))
        assert rep.value == pytest.approx(SQRT2)

    def test_rejects_non_positive(self):
        with pytest.raises(ValidationError):
            discord_quantifier(diag_state([1, 1, 1]))

    def test_engine_agreement(self, rng):
        worst = 0.0
        for _ in range(1000):
            s = random_diagonal_state(rng, scale=0.45)
            closed = discord_quantifier(s).value
            engine = quantifier_via_engine(s).value
            worst = max(worst, abs(closed - engine))
        assert worst < 1e-8

    def test_quadrant_symmetry(self, rng):
        for _ in range(50):
            s = random_diagonal_state(rng)
            uv = to_uv(s)
            base = discord_quantifier(s, validate=False).value
            for i in range(3):
                u2, v2 = uv.u.copy(), uv.v.copy()
                u2[i] *= -1
                v2[i] *= -1
                flipped = uv_to_fano(UVCoordinates(u=u2, v=v2, y=uv.y))
                assert discord_quantifier(flipped, validate=False).value == pytest.approx(base, abs=1e-12)


class TestBellDiagonal:
    def test_axis_point(self):
        assert bell_diagonal_quantifier([0, 0, 0.8]) == 0.0

    def test_half_point(self):
        assert bell_diagonal_quantifier([-0.5, -0.5, -0.5]) == pytest.approx(1 / SQRT2)

    def test_vertex(self):
        assert bell_diagonal_quantifier([1, 1, -1]) == pytest.approx(SQRT2)

    def test_outside_tetrahedron(self):
        with pytest.raises(ValidationError):
            bell_diagonal_quantifier([1, 1, 1])

    def test_matches_fano_route(self, rng):
        for _ in range(200):
            t = random_bell_diagonal(rng)
            a = bell_diagonal_quantifier(t)
            b = discord_quantifier(diag_state(t)).value
            assert a == pytest.approx(b, abs=1e-12)

    def test_grid_helper(self):
        rows = bell_grid(9)
        assert rows.shape[1] == 4
        assert np.all(rows[:, 3] >= 0)
        # axis rows score zero
        axis_rows = rows[np.abs(rows[:, 0]) + np.abs(rows[:, 1]) < 1e-12]
        assert np.allclose(axis_rows[:, 3], 0.0)


class TestFreeOps:
    def test_depolarize_to_kernel(self, rng):
        s = random_diagonal_state(rng)
        out = discord_free_op(s, "depolarize", 0.0)
        assert np.allclose(out.x, 0) and np.allclose(out.T, 0)

    def test_identity_at_one(self, rng):
        s = random_diagonal_state(rng)
        for kind in FREE_OP_KINDS:
            out = discord_free_op(s, kind, 1.0)
            assert np.allclose(out.x, s.x) and np.allclose(out.T, s.T)

    def test_dephase_ignores_pair3_state(self):
        s = diag_state([0, 0, 0.5], x=[0, 0, 0.4], y=[0, 0, 0.2])
        out = discord_free_op(s, "dephase_12", 0.3)
        assert np.allclose(out.x, s.x) and np.allclose(out.T, s.T)

    def test_bad_kind_and_lambda(self):
        s = diag_state([0, 0, 0])
        with pytest.raises(ValidationError):
            discord_free_op(s, "nope", 0.5)
        with pytest.raises(ValidationError):
            discord_free_op(s, "depolarize", 1.5)

    def test_monotone_under_all_kinds(self, rng):
        worst = 0.0
        for _ in range(1000):
            s = random_diagonal_state(rng)
            base = discord_quantifier(s).value
            for kind in FREE_OP_KINDS:
                lam = rng.uniform(0, 1)
                after = discord_quantifier(discord_free_op(s, kind, lam), validate=False).value
                worst = max(worst, after - base)
        assert worst <= 1e-9

    def test_zero_set_equivalence(self, rng):
        # under the equal-support constraint the quantifier vanishes exactly
        # on the zero-discord set
        for _ in range(500):
            if rng.uniform() < 0.5:
                i = rng.integers(0, 3)
                x = np.zeros(3)
                y = np.zeros(3)
                t = np.zeros(3)
                x[i], y[i], t[i] = rng.uniform(-0.45, 0.45, 3)
                s = TwoQubitFano(x=x, y=y, T=np.diag(t))
            else:
                s = random_diagonal_state(rng)
                s = TwoQubitFano(x=s.x, y=np.where(np.abs(s.x) > 1e-12, s.y, 0.0), T=s.T)
            if not fano_positivity(s):
                continue
            assert zero_discord_check(s) == (discord_quantifier(s).value <= 1e-9)


class TestEngineProperties:
    def test_sandwich_bounds(self, rng):
        th = discord_theory(np.zeros(3))
        for _ in range(100):
            t = random_bell_diagonal(rng, scale=0.8)
            uv = to_uv(diag_state(t))
            p = uv.as_vector()
            lo, hi = monotone_bounds(p, th)
            val = g_monotone(p, th).value
            assert lo - 1e-9 <= val <= hi + 1e-9

    def test_bell_diagonal_bounds_values(self):
        th = discord_theory(np.zeros(3))
        p = to_uv(diag_state([-0.5, -0.5, -0.5])).as_vector()
        lo, hi = monotone_bounds(p, th)
        assert lo == pytest.approx(np.sqrt(0.5))
        # kernel distance is the euclidean norm of the (u, v) vector
        assert hi == pytest.approx(np.sqrt(0.75))

    def test_shrink_monotonicity(self, rng):
        th = discord_theory(np.zeros(3))
        for _ in range(300):
            t = random_bell_diagonal(rng, scale=0.9)
            p = to_uv(diag_state(t)).as_vector()
            lam = rng.uniform(0, 1)
            shrunk = shrink_to_kernel(p, lam, np.zeros(6), kernel=th.kernel)
            assert g_monotone(shrunk, th).value <= g_monotone(p, th).value + 1e-9

    def test_kernel_in_reflected_cones(self):
        th = discord_theory(np.zeros(3))
        from starres.core import reflect_cone

        for dom in th.domains:
            assert cone_contains(reflect_cone(dom.cone), np.zeros(6))


class TestFortress:
    def test_quadrant_fortress_passes(self):
        from starres.cli import _discord_free_membership

        th = discord_theory(np.zeros(3))
        rep = validate_fortress(th, _discord_free_membership(np.zeros(3)),
                                n_samples=2000, seed=2, section_samples=8)
        assert rep.passed, rep.conditions
