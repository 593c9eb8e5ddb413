import json

import numpy as np
import pytest

from starres.errors import UnsupportedInputError, ValidationError
from starres.numerics import eigvalsh
from starres.quantum import (
    CENTER_MIXTURE,
    PauliHalfMixture,
    TwoQubitFano,
    choi_of_mixture,
    choi_of_section_point,
    fano_from_json,
    fano_positivity,
    fano_to_density,
    mixture_from_json,
    zero_discord_check,
)
from conftest import random_diagonal_state


class TestFanoToDensity:
    def test_zero_is_maximally_mixed(self):
        s = TwoQubitFano(x=np.zeros(3), y=np.zeros(3), T=np.zeros((3, 3)))
        assert np.allclose(fano_to_density(s), np.eye(4) / 4)

    def test_product_projector(self):
        s = TwoQubitFano(x=[0, 0, 1], y=[0, 0, 1], T=np.diag([0, 0, 1]))
        rho = fano_to_density(s)
        expect = np.zeros((4, 4))
        expect[0, 0] = 1.0
        assert np.allclose(rho, expect)

    def test_bell_state_spectrum(self):
        s = TwoQubitFano(x=np.zeros(3), y=np.zeros(3), T=np.diag([1, -1, 1]))
        lam = eigvalsh(fano_to_density(s))
        assert np.allclose(lam, [0, 0, 0, 1], atol=1e-12)

    def test_unit_trace_exact(self, rng):
        for _ in range(50):
            s = TwoQubitFano(x=rng.uniform(-1, 1, 3), y=rng.uniform(-1, 1, 3),
                             T=rng.uniform(-1, 1, (3, 3)))
            assert np.trace(fano_to_density(s)).real == 1.0

    def test_linearity(self, rng):
        a = TwoQubitFano(x=rng.uniform(-1, 1, 3), y=rng.uniform(-1, 1, 3), T=rng.uniform(-1, 1, (3, 3)))
        b = TwoQubitFano(x=rng.uniform(-1, 1, 3), y=rng.uniform(-1, 1, 3), T=rng.uniform(-1, 1, (3, 3)))
        mid = TwoQubitFano(x=(a.x + b.x) / 2, y=(a.y + b.y) / 2, T=(a.T + b.T) / 2)
        assert np.allclose(fano_to_density(mid),
                           (fano_to_density(a) + fano_to_density(b)) / 2)


class TestPositivity:
    def test_maximally_mixed(self):
        assert fano_positivity(TwoQubitFano(x=np.zeros(3), y=np.zeros(3), T=np.zeros((3, 3))))

    def test_invalid_t_vector(self):
        s = TwoQubitFano(x=np.zeros(3), y=np.zeros(3), T=np.diag([1.0, 1.0, 1.0]))
        assert not fano_positivity(s)
        assert eigvalsh(fano_to_density(s))[0] < -1e-6

    def test_single_triple_positive(self):
        s = TwoQubitFano(x=[0.3, 0, 0], y=np.zeros(3), T=np.diag([0.5, 0, 0]))
        assert fano_positivity(s)

    def test_closed_form_agrees_with_eigenvalues(self, rng):
        # both paths must agree wherever the closed form applies
        for _ in range(500):
            i = rng.integers(0, 3)
            x = np.zeros(3)
            y = np.zeros(3)
            t = np.zeros(3)
            x[i], y[i], t[i] = rng.uniform(-1.2, 1.2, 3)
            s = TwoQubitFano(x=x, y=y, T=np.diag(t))
            closed = fano_positivity(s)
            eig = eigvalsh(fano_to_density(s))[0] >= -1e-10
            assert closed == eig, (x, y, t)


class TestZeroDiscord:
    def test_single_triple_state(self):
        s = TwoQubitFano(x=[0.3, 0, 0], y=np.zeros(3), T=np.diag([0.5, 0, 0]))
        assert zero_discord_check(s)

    def test_bell_diagonal_not_zero(self):
        s = TwoQubitFano(x=np.zeros(3), y=np.zeros(3), T=np.diag([-0.5, -0.5, -0.5]))
        assert not zero_discord_check(s)

    def test_maximally_mixed(self):
        s = TwoQubitFano(x=np.zeros(3), y=np.zeros(3), T=np.zeros((3, 3)))
        assert zero_discord_check(s)

    def test_requires_diagonal_T(self):
        s = TwoQubitFano(x=np.zeros(3), y=np.zeros(3), T=np.array([[0, 0.2, 0], [0.2, 0, 0], [0, 0, 0]]))
        with pytest.raises(UnsupportedInputError):
            zero_discord_check(s)

    def test_product_state_with_two_x_components(self):
        # x=(0.3, 0.3, 0), t=0 is rho_A x I/2: zero discord despite two live pairs
        s = TwoQubitFano(x=[0.3, 0.3, 0], y=np.zeros(3), T=np.zeros((3, 3)))
        assert zero_discord_check(s)


class TestChoi:
    def test_center_matrix(self):
        J = choi_of_mixture(PauliHalfMixture(*CENTER_MIXTURE))
        expect = np.array([
            [1 / 3, 0, 0, 1 / 6],
            [0, 1 / 6, 0, 0],
            [0, 0, 1 / 6, 0],
            [1 / 6, 0, 0, 1 / 3],
        ])
        assert np.allclose(J, expect)

    def test_vertex_all_quarters(self):
        J = choi_of_mixture(PauliHalfMixture(1, 0, 0))
        nz = J[np.abs(J) > 0]
        assert np.allclose(nz, 0.25)

    def test_trace_and_psd_random(self, rng):
        for _ in range(200):
            w = rng.dirichlet(np.ones(3))
            J = choi_of_mixture(PauliHalfMixture(*w))
            assert abs(np.trace(J).real - 1.0) < 1e-12
            assert eigvalsh(J)[0] >= -1e-12

    def test_invalid_barycentric(self):
        with pytest.raises(ValidationError):
            PauliHalfMixture(0.5, 0.6, 0.2)
        with pytest.raises(ValidationError):
            PauliHalfMixture(-0.1, 0.6, 0.5)

    def test_section_point_endpoints(self):
        assert np.allclose(choi_of_section_point(2, 0.0),
                           choi_of_mixture(PauliHalfMixture(*CENTER_MIXTURE)))
        assert np.allclose(choi_of_section_point(1, 1.0),
                           choi_of_mixture(PauliHalfMixture(1, 0, 0)))

    def test_section_point_is_convex_combination(self, rng):
        center = choi_of_mixture(PauliHalfMixture(*CENTER_MIXTURE))
        for _ in range(100):
            j = int(rng.integers(1, 4))
            q = float(rng.uniform(0, 1))
            vertex = [0.0, 0.0, 0.0]
            vertex[j - 1] = 1.0
            expect = q * choi_of_mixture(PauliHalfMixture(*vertex)) + (1 - q) * center
            assert np.max(np.abs(choi_of_section_point(j, q) - expect)) < 1e-12

    def test_off_diagonal_sign_structure(self):
        # segments toward the first two channels differ only in the sign of
        # the middle off-diagonal entries; the third has none
        q = 0.4
        J1 = choi_of_section_point(1, q)
        J2 = choi_of_section_point(2, q)
        J3 = choi_of_section_point(3, q)
        assert J1[1, 2] == pytest.approx(q / 4)
        assert J2[1, 2] == pytest.approx(-q / 4)
        assert J3[1, 2] == 0.0
        flip = J2.copy()
        flip[1, 2] *= -1
        flip[2, 1] *= -1
        assert np.allclose(J1, flip)

    def test_section_point_validation(self):
        with pytest.raises(ValidationError):
            choi_of_section_point(4, 0.5)
        with pytest.raises(ValidationError):
            choi_of_section_point(1, 1.5)


class TestCrossModuleZeroDiscord:
    def test_zero_discord_implies_zero_monotone(self, rng):
        from starres.discord import discord_quantifier

        # zero-discord states of the single-basis form: one live triple
        for _ in range(1000):
            i = rng.integers(0, 3)
            x = np.zeros(3)
            y = np.zeros(3)
            t = np.zeros(3)
            x[i], y[i], t[i] = rng.uniform(-0.5, 0.5, 3)
            s = TwoQubitFano(x=x, y=y, T=np.diag(t))
            if not fano_positivity(s):
                continue
            assert zero_discord_check(s)
            assert discord_quantifier(s).value <= 1e-8


class TestJson:
    def test_fano_round_trip(self):
        doc = {"x": [0.1, 0, 0], "y": [0, 0.2, 0], "T": np.diag([0.3, 0, 0]).tolist()}
        s = fano_from_json(json.dumps(doc))
        assert np.allclose(s.x, [0.1, 0, 0])
        assert np.allclose(s.T, np.diag([0.3, 0, 0]))

    def test_mixture(self):
        m = mixture_from_json('{"a": 0.2, "b": 0.3, "c": 0.5}')
        assert m.as_array() == pytest.approx([0.2, 0.3, 0.5])
