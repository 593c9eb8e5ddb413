"""Star resource theory of two-qubit quantum discord (Alice's side).

Works in the pi/4-rotated coordinates u_i = (x_i + t_i)/sqrt(2),
v_i = (x_i - t_i)/sqrt(2), where the zero-discord set is a union of three
rectangles and the 64 coordinate quadrants form a fortress.

The per-section distance is Euclidean in the six-dimensional (u, v)
representation, which reproduces the closed-form quantifier of the theory;
it is not the operator trace distance, a discrepancy recorded rather than
resolved.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .core import ConvexSection, Domain, PolyhedralCone, StarTheory, WitnessReport, g_monotone
from .errors import UnsupportedInputError, ValidationError
from .numerics import geometric_mean
from .quantum import TwoQubitFano, fano_positivity

SQRT2 = np.sqrt(2.0)

FREE_OP_KINDS = ("dephase_12", "stochastic_3", "depolarize")

# coordinate layout of the 6-dim representation: (u1, u2, u3, v1, v2, v3)


@dataclass(frozen=True)
class UVCoordinates:
    u: np.ndarray
    v: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "u", np.asarray(self.u, dtype=float).reshape(3))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float).reshape(3))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float).reshape(3))

    def as_vector(self):
        return np.concatenate([self.u, self.v])


def to_uv(state):
    """Rotate (x, t) by pi/4 per coordinate pair; y rides along."""
    if not state.has_diagonal_T():
        raise UnsupportedInputError("to_uv requires a diagonal correlation matrix")
    t = np.diag(state.T)
    return UVCoordinates(u=(state.x + t) / SQRT2, v=(state.x - t) / SQRT2, y=state.y)


def uv_to_fano(uv):
    x = (uv.u + uv.v) / SQRT2
    t = (uv.u - uv.v) / SQRT2
    return TwoQubitFano(x=x, y=uv.y, T=np.diag(t))


def quadrant_index(signs_u, signs_v):
    """Deterministic index of the quadrant cone with the given sign bits."""
    bits = list(signs_u) + list(signs_v)
    idx = 0
    for b in bits:
        idx = 2 * idx + int(b)
    return idx


def discord_theory(y):
    """Quadrant fortress plus the three rectangular free sections per cone.

    Rectangle i spans the signed u_i axis up to (1 + y_i)/sqrt(2) and the
    signed v_i axis up to (1 - y_i)/sqrt(2); the kernel is the origin
    (maximally mixed state).
    """
    y = np.asarray(y, dtype=float).reshape(3)
    if np.any(np.abs(y) > 1.0 + 1e-12):
        raise ValidationError("|y_i| must not exceed 1")
    half_u = (1.0 + y) / SQRT2
    half_v = (1.0 - y) / SQRT2
    domains = []
    for bits_u in itertools.product((0, 1), repeat=3):
        for bits_v in itertools.product((0, 1), repeat=3):
            frame = np.zeros((6, 6))
            for i in range(3):
                frame[i, i] = (-1.0) ** bits_u[i]
                frame[3 + i, 3 + i] = (-1.0) ** bits_v[i]
            cone = PolyhedralCone(apex=np.zeros(6), frame=frame)
            sections = []
            for i in range(3):
                su = (-1.0) ** bits_u[i]
                sv = (-1.0) ** bits_v[i]
                axes = np.zeros((2, 6))
                axes[0, i] = su
                axes[1, 3 + i] = sv
                center = 0.5 * (half_u[i] * axes[0] + half_v[i] * axes[1])
                sections.append(
                    ConvexSection(
                        label=f"rect{i + 1}",
                        kind="box",
                        params={
                            "center": center,
                            "half_widths": np.array([half_u[i] / 2.0, half_v[i] / 2.0]),
                            "axes": axes,
                        },
                        metric="L2",
                    )
                )
            domains.append(Domain(cone=cone, sections=tuple(sections)))
    box = np.vstack([-SQRT2 * np.ones(6), SQRT2 * np.ones(6)])
    return StarTheory(
        dim=6,
        kernel=np.zeros((1, 6)),
        domains=tuple(domains),
        ambient=box,
        critical=0.0,
        kernel_metric="L2",
    )


def _pair_sq(uv):
    return uv.u**2 + uv.v**2


def _per_section_distances(uv):
    s = _pair_sq(uv)
    return [float(np.sqrt(s.sum() - s[i])) for i in range(3)]


def discord_quantifier(state, validate=True):
    """Closed-form geometric-mean discord quantifier for diagonal-T states.

    validate=False skips the positivity gate; the coordinate formula is
    defined on all of the (u, v) representation, which the free-operation
    monotonicity checks rely on.
    """
    if validate and not fano_positivity(state):
        raise ValidationError("state is not positive semidefinite")
    uv = to_uv(state)
    per_section = _per_section_distances(uv)
    value = geometric_mean(per_section)
    bits_u = tuple(1 if ui < 0 else 0 for ui in uv.u)
    bits_v = tuple(1 if vi < 0 else 0 for vi in uv.v)
    return WitnessReport(
        value=value,
        domain_index=quadrant_index(bits_u, bits_v),
        per_section=per_section,
        margin=value,
        critical=0.0,
    )


_TETRA_SIGNS = np.array([
    [-1.0, -1.0, -1.0],
    [-1.0, 1.0, 1.0],
    [1.0, -1.0, 1.0],
    [1.0, 1.0, -1.0],
])


def in_bell_tetrahedron(t, tol=1e-12):
    t = np.asarray(t, dtype=float).reshape(3)
    # eigenvalues of rho(t) are (1 + t.v)/4 over the four Bell vertices v
    return bool(np.all(1.0 + _TETRA_SIGNS @ t >= -4.0 * tol))


def bell_diagonal_quantifier(t):
    """Quantifier for Bell-diagonal states: cbrt(prod_i sqrt(sum_{j!=i} t_j^2))."""
    t = np.asarray(t, dtype=float).reshape(3)
    if not in_bell_tetrahedron(t):
        raise ValidationError("t lies outside the Bell-diagonal state tetrahedron")
    s = t * t
    return geometric_mean([float(np.sqrt(s.sum() - s[i])) for i in range(3)])


def discord_free_op(state, kind, lam):
    """Scale the designated (u_i, v_i) pairs by lam and return to (x, t).

    dephase_12 contracts pairs 1 and 2 (local dephasing on Alice's side),
    stochastic_3 contracts pair 3, depolarize contracts all pairs (white
    noise; Bob's Bloch vector shrinks along with it).
    """
    if kind not in FREE_OP_KINDS:
        raise ValidationError(f"unknown free-op kind {kind!r}")
    if not 0.0 <= lam <= 1.0:
        raise ValidationError("lambda must lie in [0, 1]")
    uv = to_uv(state)
    scale = np.ones(3)
    if kind == "dephase_12":
        scale[0] = scale[1] = lam
    elif kind == "stochastic_3":
        scale[2] = lam
    else:
        scale[:] = lam
    new = UVCoordinates(u=uv.u * scale, v=uv.v * scale, y=uv.y * (lam if kind == "depolarize" else 1.0))
    return uv_to_fano(new)


def quantifier_via_engine(state, tol=1e-8):
    """g_monotone of the quadrant theory; agrees with the closed form."""
    uv = to_uv(state)
    return g_monotone(uv.as_vector(), discord_theory(uv.y), tol=tol)


def bell_grid(resolution):
    """Tetrahedron grid (t1, t2, t3, value) rows used by the sweep command."""
    axis = np.linspace(-1.0, 1.0, resolution)
    T1, T2, T3 = np.meshgrid(axis, axis, axis, indexing="ij")
    pts = np.stack([T1.ravel(), T2.ravel(), T3.ravel()], axis=1)
    inside = np.all(1.0 + pts @ _TETRA_SIGNS.T >= -1e-12, axis=1)
    pts = pts[inside]
    s = pts**2
    tot = s.sum(axis=1, keepdims=True)
    factors = np.sqrt(np.maximum(tot - s, 0.0))
    values = np.cbrt(factors[:, 0] * factors[:, 1] * factors[:, 2])
    return np.column_stack([pts, values])
