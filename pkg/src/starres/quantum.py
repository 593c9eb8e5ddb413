"""Two-qubit Fano/Bloch states and p=1/2 Pauli-channel mixtures.

Channel distances are represented throughout by the trace distance of the
corresponding Choi states; for general channels this is a lower-bound proxy
of the diamond-norm distance, exact in the applications handled here.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedInputError, ValidationError
from .numerics import eigvalsh

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
_I2 = np.eye(2, dtype=complex)

CENTER_MIXTURE = (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)


@dataclass(frozen=True)
class TwoQubitFano:
    """Fano parameterization: local Bloch vectors x, y and correlation matrix T."""

    x: np.ndarray
    y: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).reshape(3)
        y = np.asarray(self.y, dtype=float).reshape(3)
        T = np.asarray(self.T, dtype=float).reshape(3, 3)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "T", T)

    @property
    def t_diagonal(self):
        if not self.has_diagonal_T():
            raise UnsupportedInputError("correlation matrix is not diagonal")
        return np.diag(self.T).copy()

    def has_diagonal_T(self, tol=1e-12):
        off = self.T - np.diag(np.diag(self.T))
        return bool(np.max(np.abs(off)) <= tol)


@dataclass(frozen=True)
class PauliHalfMixture:
    """Barycentric mixture a,b,c of the three p=1/2 Pauli channels."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        coeffs = np.array([self.a, self.b, self.c], dtype=float)
        if np.any(coeffs < -1e-12):
            raise ValidationError("barycentric coordinates must be nonnegative")
        if abs(coeffs.sum() - 1.0) > 1e-12:
            raise ValidationError("barycentric coordinates must sum to 1")
        object.__setattr__(self, "a", float(coeffs[0]))
        object.__setattr__(self, "b", float(coeffs[1]))
        object.__setattr__(self, "c", float(coeffs[2]))

    def as_array(self):
        return np.array([self.a, self.b, self.c])


def fano_to_density(state):
    """(1/4)(IimesI + sum x_i s_i x I + sum y_i I x s_i + sum T_ij s_i x s_j)."""
    rho = np.kron(_I2, _I2).astype(complex)
    for i in range(3):
        rho += state.x[i] * np.kron(PAULI[i], _I2)
        rho += state.y[i] * np.kron(_I2, PAULI[i])
        for j in range(3):
            if state.T[i, j] != 0.0:
                rho += state.T[i, j] * np.kron(PAULI[i], PAULI[j])
    return rho / 4.0


def _single_triple_index(state, tol=1e-12):
    """Index of the only nonzero (x_i, y_i, t_i) triple, or None."""
    if not state.has_diagonal_T(tol):
        return None
    t = np.diag(state.T)
    live = [
        i
        for i in range(3)
        if abs(state.x[i]) > tol or abs(state.y[i]) > tol or abs(t[i]) > tol
    ]
    if len(live) <= 1:
        return live[0] if live else 0
    return None


def fano_positivity(state, tol=1e-10):
    """Positivity of the Fano state.

    Single-triple diagonal states use the three closed-form inequalities;
    the general case falls back to the eigenvalue check.
    """
    idx = _single_triple_index(state)
    if idx is not None:
        x = float(state.x[idx])
        y = float(state.y[idx])
        t = float(state.T[idx, idx])
        s2 = x * x + y * y + t * t
        cond1 = 3.0 - s2 >= -tol
        cond2 = 1.0 + 2.0 * x * t * y - s2 >= -tol
        cond3 = (
            8.0 * x * t * y
            + (s2 - 1.0) ** 2
            - 4.0 * y * y * (x * x + t * t)
            - 4.0 * x * x * t * t
            >= -tol
        )
        return bool(cond1 and cond2 and cond3)
    lam = eigvalsh(fano_to_density(state))
    return bool(lam[0] >= -tol)


def zero_discord_check(state, tol=1e-9):
    """Zero discord on Alice's side for diagonal correlation matrices.

    Builds K_ij = x_i x_j + t_i^2 delta_ij and tests whether
    |x|^2 + |t|^2 equals the largest eigenvalue of K.
    Symmetric non-diagonal T should be rotated to diagonal form by the caller.
    """
    if not state.has_diagonal_T():
        raise UnsupportedInputError("zero_discord_check requires a diagonal correlation matrix")
    x = state.x
    t = np.diag(state.T)
    K = np.outer(x, x) + np.diag(t * t)
    kappa_max = eigvalsh(K.astype(complex))[-1]
    return bool(abs(float(x @ x) + float(t @ t) - kappa_max) <= tol)


def choi_of_mixture(mixture):
    """Choi state of the barycentric Pauli-channel mixture at p=1/2.

    Corner block carries (1 +- c)/4 and the middle block (a +- b)/4.
    """
    a, b, c = mixture.a, mixture.b, mixture.c
    J = np.zeros((4, 4), dtype=complex)
    J[0, 0] = J[3, 3] = (1.0 + c) / 4.0
    J[0, 3] = J[3, 0] = (1.0 - c) / 4.0
    J[1, 1] = J[2, 2] = (a + b) / 4.0
    J[1, 2] = J[2, 1] = (a - b) / 4.0
    return J


def choi_of_section_point(j, q):
    """Choi state of the segment point q*Gamma_j + (1-q)*Gamma_d.

    Exactly the entrywise convex combination of the vertex and center Choi
    matrices. The section index follows the channel index of the mixture
    coordinates (j=1 and j=2 differ only in the sign of the middle
    off-diagonal entries; j=3 has none).
    """
    if j not in (1, 2, 3):
        raise ValidationError("section index must be 1, 2 or 3")
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise ValidationError("q must lie in [0, 1]")
    vertex = [0.0, 0.0, 0.0]
    vertex[j - 1] = 1.0
    J_vertex = choi_of_mixture(PauliHalfMixture(*vertex))
    J_center = choi_of_mixture(PauliHalfMixture(*CENTER_MIXTURE))
    return q * J_vertex + (1.0 - q) * J_center


def fano_from_json(text):
    doc = json.loads(text) if isinstance(text, str) else text
    return TwoQubitFano(x=np.asarray(doc["x"]), y=np.asarray(doc["y"]), T=np.asarray(doc["T"]))


def mixture_from_json(text):
    doc = json.loads(text) if isinstance(text, str) else text
    return PauliHalfMixture(a=float(doc["a"]), b=float(doc["b"]), c=float(doc["c"]))
