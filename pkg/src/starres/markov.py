"""Witness of non-Markovianity for p=1/2 mixtures of three Pauli channels.

Only that cross-section of the mixture triangle is modeled. The auxiliary
free set consists of the three segments from the center channel to the
vertices; section distances are Choi-state trace distances and the critical
constant is (7 - 3*sqrt(5))/8, attained at the focus channels.
"""

import numpy as np

from .core import (
    ConvexSection,
    Domain,
    PolyhedralCone,
    StarTheory,
    g_monotone,
)
from .errors import ValidationError
from .numerics import minimize_1d, trace_distance
from .quantum import CENTER_MIXTURE, PauliHalfMixture, choi_of_mixture, choi_of_section_point

MARKOV_CRITICAL = (7.0 - 3.0 * np.sqrt(5.0)) / 8.0
FOCUS_MINIMIZER_Q = (7.0 - 3.0 * np.sqrt(5.0)) / 4.0

_CENTER = np.asarray(CENTER_MIXTURE)


def _as_mixture(m):
    if isinstance(m, PauliHalfMixture):
        return m
    arr = np.asarray(m, dtype=float).reshape(3)
    return PauliHalfMixture(*arr)


def segment_distance(m, j, tol=1e-10):
    """min over q in [0, 1] of the Choi trace distance to segment F_j."""
    mix = _as_mixture(m)
    J = choi_of_mixture(mix)
    _, dist = minimize_1d(lambda q: trace_distance(J, choi_of_section_point(j, q)), 0.0, 1.0, tol=tol)
    return dist


def segment_distance_argmin(m, j, tol=1e-10):
    mix = _as_mixture(m)
    J = choi_of_mixture(mix)
    return minimize_1d(lambda q: trace_distance(J, choi_of_section_point(j, q)), 0.0, 1.0, tol=tol)


def choi_trace_distance_closed(w1, w2):
    """Closed-form trace distance between the Choi states of two mixtures.

    The difference matrix splits into two 2x2 blocks whose eigenvalues are
    explicit in the barycentric differences; cross-checked against the
    eigenvalue route in the tests.
    """
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    da = w1[..., 0] - w2[..., 0]
    db = w1[..., 1] - w2[..., 1]
    dc = w1[..., 2] - w2[..., 2]
    delta = da - db
    return np.abs(dc) / 4.0 + np.abs(delta - dc) / 8.0 + np.abs(delta + dc) / 8.0


def segment_distance_closed(points, j):
    """Vectorized segment distance via the closed-form Choi trace distance.

    The objective is convex piecewise linear in q, so the minimum sits at a
    kink or an endpoint; all candidates are evaluated in closed form.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    e = np.zeros(3)
    e[j - 1] = 1.0
    # barycentric differences to the segment point are linear in q:
    # delta(q) = (P - center) - q * (e - center)
    d0 = P - _CENTER[None, :]
    sl = -(e - _CENTER)
    a0, b0, c0 = d0[:, 0], d0[:, 1], d0[:, 2]
    a1, b1, c1 = sl[0], sl[1], sl[2]
    terms = (
        (c0, c1, 0.25),
        (a0 - b0 - c0, a1 - b1 - c1, 0.125),
        (a0 - b0 + c0, a1 - b1 + c1, 0.125),
    )
    cands = [np.zeros(P.shape[0]), np.ones(P.shape[0])]
    for v0, v1, _ in terms:
        if v1 != 0.0:
            cands.append(np.clip(-v0 / v1, 0.0, 1.0))
    Q = np.stack(cands, axis=1)
    vals = np.zeros_like(Q)
    for v0, v1, w in terms:
        vals += w * np.abs(v0[:, None] + v1 * Q)
    return vals.min(axis=1)


def markov_theory():
    """Three support cones with apex at the center channel, two segments each."""
    domains = []
    sections = {}
    for j in (1, 2, 3):
        def make_distance(jj):
            return lambda p: segment_distance(p, jj)

        def make_sampler(jj):
            e = np.zeros(3)
            e[jj - 1] = 1.0

            def sampler(rng, n):
                q = rng.uniform(0.0, 1.0, size=n)
                return _CENTER[None, :] + q[:, None] * (e - _CENTER)[None, :]

            return sampler

        sections[j] = ConvexSection(
            label=f"F{j}",
            kind="callable",
            params={"distance": make_distance(j), "samples": make_sampler(j)},
            metric="choi-trace",
        )
    for k in (1, 2, 3):
        frame = []
        for i in (1, 2, 3):
            if i == k:
                continue
            e = np.zeros(3)
            e[i - 1] = 1.0
            frame.append(e - _CENTER)
        cone = PolyhedralCone(apex=_CENTER, frame=np.asarray(frame))
        secs = tuple(sections[i] for i in (1, 2, 3) if i != k)
        domains.append(Domain(cone=cone, sections=secs))
    center_choi = choi_of_mixture(PauliHalfMixture(*CENTER_MIXTURE))
    return StarTheory(
        dim=3,
        kernel=_CENTER[None, :],
        domains=tuple(domains),
        ambient=np.eye(3),
        critical=MARKOV_CRITICAL,
        kernel_distance_fn=lambda p: trace_distance(choi_of_mixture(_as_mixture(p)), center_choi),
    )


def boundary_point(i, j, s):
    """Quadratic Bezier point (1-s)^2 G_i + 2s(1-s) G_d + s^2 G_j."""
    if i not in (1, 2, 3) or j not in (1, 2, 3) or i == j:
        raise ValidationError("need distinct channel indices in 1..3")
    if not 0.0 <= s <= 1.0:
        raise ValidationError("s must lie in [0, 1]")
    ei = np.zeros(3)
    ei[i - 1] = 1.0
    ej = np.zeros(3)
    ej[j - 1] = 1.0
    w = (1.0 - s) ** 2 * ei + 2.0 * s * (1.0 - s) * _CENTER + s**2 * ej
    return PauliHalfMixture(*w)


def focus_channel(k):
    """Channel at the focus of the arc inside cone k: weight sqrt(5)-2 on
    channel k and (3-sqrt(5))/2 on the other two."""
    if k not in (1, 2, 3):
        raise ValidationError("channel index must be 1, 2 or 3")
    w = np.full(3, (3.0 - np.sqrt(5.0)) / 2.0)
    w[k - 1] = np.sqrt(5.0) - 2.0
    return PauliHalfMixture(*w)


def markov_quantifier(m, tol=1e-8):
    """g_monotone of the segment theory at the mixture m."""
    mix = _as_mixture(m)
    return g_monotone(mix.as_array(), markov_theory(), tol=tol)


def markov_witness(m):
    """markov_quantifier - (7-3*sqrt(5))/8; positive certifies non-Markovianity."""
    return markov_quantifier(m).value - MARKOV_CRITICAL


def conic_rng_reparam(lambda_i, lambda_j, s, eps):
    """Reparameterize a contracted arc mixture as a new (s_bar, eps') pair.

    s_bar = sqrt(l_j) s / (sqrt(l_j) s + sqrt(l_i)(1-s));
    1 - eps' = (1 - eps) (sqrt(l_j) s + sqrt(l_i)(1-s))^2.
    Degenerate contractions (both weights zero) return (nan, 1.0).
    """
    for name, v in (("lambda_i", lambda_i), ("lambda_j", lambda_j), ("s", s), ("eps", eps)):
        if not 0.0 <= v <= 1.0:
            raise ValidationError(f"{name} must lie in [0, 1]")
    wj = np.sqrt(lambda_j) * s
    wi = np.sqrt(lambda_i) * (1.0 - s)
    denom = wj + wi
    if denom == 0.0:
        return float("nan"), 1.0
    s_bar = wj / denom
    eps_prime = 1.0 - (1.0 - eps) * denom**2
    return float(s_bar), float(eps_prime)


def quantifier_grid(points):
    """Vectorized markov quantifier over (n, 3) barycentric points.

    Cone membership reduces to sign checks of the centered coordinates;
    values use the closed-form segment distances (tested against the
    minimize_1d route).
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    dev = P - _CENTER[None, :]
    dists = {j: segment_distance_closed(P, j) for j in (1, 2, 3)}
    values = np.zeros(P.shape[0])
    for k in (1, 2, 3):
        others = [i for i in (1, 2, 3) if i != k]
        # frame coefficients of dev on {e_i - center} are dev_i - dev_k,
        # so membership in cone k means dev_k is the smallest coordinate
        coef = np.stack([dev[:, i - 1] - dev[:, k - 1] for i in others], axis=1)
        inside = np.all(coef >= -1e-12, axis=1)
        val = np.sqrt(dists[others[0]] * dists[others[1]])
        values = np.where(inside, np.maximum(values, val), values)
    return values


def markov_region_boundary(k, w):
    """Point of the true Markovian-region arc opposite vertex k.

    For the coordinate w <= sqrt(5)-2 of channel k, the two remaining
    weights are (1-w)/2 * (1 +- sqrt((5-(w+2)^2)/(1-w^2))).
    """
    if k not in (1, 2, 3):
        raise ValidationError("channel index must be 1, 2 or 3")
    if not 0.0 <= w <= np.sqrt(5.0) - 2.0 + 1e-12:
        raise ValidationError("w must lie in [0, sqrt(5)-2]")
    w = min(w, np.sqrt(5.0) - 2.0)
    rad = np.sqrt(max((5.0 - (w + 2.0) ** 2) / (1.0 - w * w), 0.0)) if w < 1.0 else 0.0
    a_plus = (1.0 - w) / 2.0 * (1.0 + rad)
    a_minus = 1.0 - w - a_plus
    out = np.empty(3)
    others = [i for i in (1, 2, 3) if i != k]
    out[k - 1] = w
    out[others[0] - 1] = a_plus
    out[others[1] - 1] = a_minus
    return PauliHalfMixture(*out)
