"""Witness of total correlations for bipartite output distributions.

The auxiliary polyhedral free set consists of the faces F_Ai (Alice's output
pinned to i) and F_Bj (Bob's pinned to j), each the convex hull of the
matching deterministic corners and the flat distribution. Section distances
are total variation (half L1), which reproduces the closed-form per-face
projections and the critical constant 1/16 for two outputs per side.
"""

from dataclasses import dataclass

import numpy as np

from .core import (
    ConvexSection,
    Domain,
    PolyhedralCone,
    StarTheory,
    WitnessReport,
    cone_contains,
    cone_coefficients,
)
from .errors import UnsupportedInputError, ValidationError
from .numerics import geometric_mean

TC_CRITICAL = 1.0 / 16.0


@dataclass(frozen=True)
class JointDistribution:
    """Joint probabilities p(a, b) over n_A x n_B outputs."""

    p: np.ndarray

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.p, dtype=float))
        if p.ndim != 2 or p.shape[0] < 2 or p.shape[1] < 2:
            raise ValidationError("need an n_A x n_B matrix with n_A, n_B >= 2")
        if np.any(p < -1e-12):
            raise ValidationError("probabilities must be nonnegative")
        if abs(p.sum() - 1.0) > 1e-10:
            raise ValidationError("probabilities must sum to 1")
        object.__setattr__(self, "p", p)

    @property
    def n_A(self):
        return self.p.shape[0]

    @property
    def n_B(self):
        return self.p.shape[1]

    def flat(self):
        return self.p.reshape(-1)


def _delta(n_A, n_B, a, b):
    v = np.zeros(n_A * n_B)
    v[a * n_B + b] = 1.0
    return v


def _eta(n_A, n_B):
    return np.full(n_A * n_B, 1.0 / (n_A * n_B))


def face_vertices(n_A, n_B, side, index):
    """Vertices of F_Ai or F_Bj: the matching corners plus the flat point."""
    eta = _eta(n_A, n_B)
    if side == "A":
        verts = [_delta(n_A, n_B, index, b) for b in range(n_B)]
    elif side == "B":
        verts = [_delta(n_A, n_B, a, index) for a in range(n_A)]
    else:
        raise ValidationError("side must be 'A' or 'B'")
    verts.append(eta)
    return np.asarray(verts)


def face_distance_tv(p_flat, n_A, n_B, side, index):
    """Exact TV distance from a distribution to a face.

    Reduces to a convex piecewise-linear function of the flat weight gamma,
    minimized over its breakpoints:
      f(gamma) = sum_out (p_e - gamma/N)_+
               + (sum_in (p_e - gamma/N)_+ - (1 - gamma))_+
    """
    p = np.asarray(p_flat, dtype=float).reshape(n_A, n_B)
    N = n_A * n_B
    if side == "A":
        in_row = p[index, :]
        out = np.delete(p, index, axis=0).reshape(-1)
    else:
        in_row = p[:, index]
        out = np.delete(p, index, axis=1).reshape(-1)

    def f(gamma):
        demand = np.maximum(in_row - gamma / N, 0.0).sum()
        spill = max(demand - (1.0 - gamma), 0.0)
        return np.maximum(out - gamma / N, 0.0).sum() + spill

    candidates = [0.0, 1.0]
    candidates.extend(float(N * v) for v in np.concatenate([in_row, out]))
    srt = np.sort(in_row)[::-1]
    for k in range(1, len(srt) + 1):
        if k != N:
            candidates.append(float((1.0 - srt[:k].sum()) / (1.0 - k / N)))
    best = np.inf
    for g in candidates:
        if -1e-12 <= g <= 1.0 + 1e-12:
            best = min(best, f(min(max(g, 0.0), 1.0)))
    return float(best)


def _cone_frame(n_A, n_B, i, j):
    eta = _eta(n_A, n_B)
    rows = [( i, j)]
    rows += [(i, k) for k in range(n_B) if k != j]
    rows += [(l, j) for l in range(n_A) if l != i]
    return np.asarray([_delta(n_A, n_B, a, b) - eta for a, b in rows]), rows


def tc_theory(n_A, n_B):
    """Fortress of cones C_ij with adjacent face pairs {F_Ai, F_Bj}."""
    if n_A < 2 or n_B < 2:
        raise ValidationError("need at least two outputs per side")
    eta = _eta(n_A, n_B)
    face_sections = {}
    for i in range(n_A):
        face_sections[("A", i)] = ConvexSection(
            label=f"FA{i}", kind="polytope",
            params={"vertices": face_vertices(n_A, n_B, "A", i)}, metric="TV",
        )
    for j in range(n_B):
        face_sections[("B", j)] = ConvexSection(
            label=f"FB{j}", kind="polytope",
            params={"vertices": face_vertices(n_A, n_B, "B", j)}, metric="TV",
        )
    domains = []
    for i in range(n_A):
        for j in range(n_B):
            frame, _ = _cone_frame(n_A, n_B, i, j)
            cone = PolyhedralCone(apex=eta, frame=frame)
            domains.append(Domain(cone=cone, sections=(face_sections[("A", i)], face_sections[("B", j)])))
    simplex = np.eye(n_A * n_B)
    return StarTheory(
        dim=n_A * n_B,
        kernel=eta[None, :],
        domains=tuple(domains),
        ambient=simplex,
        critical=TC_CRITICAL if (n_A == 2 and n_B == 2) else 0.0,
        kernel_metric="TV",
    )


def free_point(x, y, eps, n_A=2, n_B=2):
    """Uncorrelated distribution (1-eps) * pA x pB + eps * eta for two outputs."""
    if n_A != 2 or n_B != 2:
        raise ValidationError("free_point is parameterized for two outputs per side")
    pa = np.array([x, 1.0 - x])
    pb = np.array([y, 1.0 - y])
    p = (1.0 - eps) * np.outer(pa, pb) + eps * 0.25
    return JointDistribution(p=p)


def tc_membership(dist, tol=1e-3):
    """Smallest eps with p = (1-eps) pA x pB + eps * eta, or None.

    Scans eps on a 1e-3 grid and tests nonnegative rank-1 decomposability of
    the residual matrix by power iteration (the grid step bounds the
    achievable tolerance).
    """
    p = dist.p
    n_A, n_B = p.shape
    eta = 1.0 / (n_A * n_B)
    uniform = (np.full(n_A, 1.0 / n_A), np.full(n_B, 1.0 / n_B))
    for eps in np.arange(0.0, 1.0 + 1e-9, 1e-3):
        eps = min(eps, 1.0)
        M = p - eps * eta
        if np.any(M < -tol):
            continue
        M = np.maximum(M, 0.0)
        if M.sum() <= tol:
            return float(eps), uniform[0], uniform[1]
        u = np.full(n_A, 1.0 / np.sqrt(n_A))
        v = np.full(n_B, 1.0 / np.sqrt(n_B))
        for _ in range(200):
            u_new = M @ v
            nu = np.linalg.norm(u_new)
            if nu == 0.0:
                break
            u_new /= nu
            v_new = M.T @ u_new
            nv = np.linalg.norm(v_new)
            if nv == 0.0:
                break
            v_new /= nv
            drift = np.linalg.norm(u_new - u) + np.linalg.norm(v_new - v)
            u, v = u_new, v_new
            if drift < 1e-14:
                break
        sigma = float(u @ M @ v)
        rank1 = sigma * np.outer(np.abs(u), np.abs(v))
        if np.linalg.norm(M - rank1) <= tol:
            total = rank1.sum()
            if total <= 0.0:
                return float(eps), uniform[0], uniform[1]
            pa = rank1.sum(axis=1) / total
            pb = rank1.sum(axis=0) / total
            return float(eps), pa, pb
    return None


def tc_quantifier(dist, tol=1e-8):
    """Geometric-mean TV quantifier over the fortress domains containing p."""
    p = dist.flat()
    n_A, n_B = dist.n_A, dist.n_B
    theory = tc_theory(n_A, n_B)
    face_cache = {}

    def fd(side, index):
        if (side, index) not in face_cache:
            face_cache[(side, index)] = face_distance_tv(p, n_A, n_B, side, index)
        return face_cache[(side, index)]

    best = None
    for idx, dom in enumerate(theory.domains):
        i, j = divmod(idx, n_B)
        in_cone = cone_contains(dom.cone, p, tol)
        if not in_cone:
            if fd("A", i) > tol and fd("B", j) > tol:
                continue
        dists = [fd("A", i), fd("B", j)]
        value = geometric_mean(dists)
        if best is None or value > best.value + 1e-15:
            best = WitnessReport(
                value=value,
                domain_index=idx,
                per_section=dists,
                margin=value - theory.critical,
                critical=theory.critical,
            )
    if best is None:
        raise ValidationError("distribution lies outside every fortress domain")
    return best


def tc_witness(dist):
    """tc_quantifier - 1/16; positive certifies total correlations (n=2 only)."""
    if dist.n_A != 2 or dist.n_B != 2:
        raise UnsupportedInputError("the 1/16 critical constant is proven for 2x2 outputs only")
    return tc_quantifier(dist).value - TC_CRITICAL


def tc_free_op(dist, lam_A, lam_B, tol=1e-8):
    """Factorized hyperbolic contraction lam_kl = lam_A[k] * lam_B[l].

    Scales the frame coefficients of p in its domain cone C_ij. The domain's
    own outputs (i, j) serve as the reference: their lambdas are pinned to
    one, which is the resource-non-generating condition of the factorized
    family and makes the map send free points exactly to free points.
    """
    lam_A = np.asarray(lam_A, dtype=float)
    lam_B = np.asarray(lam_B, dtype=float)
    n_A, n_B = dist.n_A, dist.n_B
    if lam_A.shape[0] != n_A or lam_B.shape[0] != n_B:
        raise ValidationError("one lambda per output required on each side")
    if np.any(lam_A < 0.0) or np.any(lam_A > 1.0) or np.any(lam_B < 0.0) or np.any(lam_B > 1.0):
        raise ValidationError("lambdas must lie in [0, 1]")
    p = dist.flat()
    eta = _eta(n_A, n_B)
    for i in range(n_A):
        for j in range(n_B):
            frame, rows = _cone_frame(n_A, n_B, i, j)
            cone = PolyhedralCone(apex=eta, frame=frame)
            if not cone_contains(cone, p, tol):
                continue
            coef = cone_coefficients(cone, p, tol)
            scale = np.array([
                (lam_A[a] if a != i else 1.0) * (lam_B[b] if b != j else 1.0)
                for a, b in rows
            ])
            new_flat = eta + (coef * scale) @ frame
            return JointDistribution(p=new_flat.reshape(n_A, n_B))
    raise ValidationError("distribution coefficients not recoverable in any cone")


# ---------------------------------------------------------------------------
# vectorized grid evaluation (sweeps and the critical-value search)
# ---------------------------------------------------------------------------

def _face_distance_grid(P, in_cols, out_cols):
    """Vectorized face_distance_tv for 2x2 distributions, P of shape (n, 4)."""
    n = P.shape[0]
    r = P[:, in_cols]   # (n, 2)
    o = P[:, out_cols]  # (n, 2)
    top = np.sort(r, axis=1)[:, ::-1]
    cands = np.empty((n, 8))
    cands[:, 0] = 0.0
    cands[:, 1] = 1.0
    cands[:, 2:6] = 4.0 * P
    cands[:, 6] = (1.0 - top[:, 0]) / (1.0 - 0.25)
    cands[:, 7] = (1.0 - top[:, 0] - top[:, 1]) / (1.0 - 0.5)
    cands = np.clip(cands, 0.0, 1.0)
    g = cands[:, :, None]
    demand = np.maximum(r[:, None, :] - g / 4.0, 0.0).sum(axis=2)
    spill = np.maximum(demand - (1.0 - cands), 0.0)
    vals = np.maximum(o[:, None, :] - g / 4.0, 0.0).sum(axis=2) + spill
    return vals.min(axis=1)


_FACE_COLS = {
    ("A", 0): ([0, 1], [2, 3]),
    ("A", 1): ([2, 3], [0, 1]),
    ("B", 0): ([0, 2], [1, 3]),
    ("B", 1): ([1, 3], [0, 2]),
}


def quantifier_grid(P, chunk=200_000):
    """tc_quantifier values for many flattened 2x2 distributions at once.

    p lies in cone C_ij exactly when the complementary entry p(i+1, j+1) is
    a minimum of p; the value is the max over the containing cones (ties sit
    on symmetry planes and give equal values).
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    out = np.empty(P.shape[0])
    # flat index of the complementary corner for cone (i, j), a-major layout
    complement = {(0, 0): 3, (0, 1): 2, (1, 0): 1, (1, 1): 0}
    for lo in range(0, P.shape[0], chunk):
        block = P[lo:lo + chunk]
        dA = {i: _face_distance_grid(block, *_FACE_COLS[("A", i)]) for i in (0, 1)}
        dB = {j: _face_distance_grid(block, *_FACE_COLS[("B", j)]) for j in (0, 1)}
        pmin = block.min(axis=1)
        vals = np.zeros(block.shape[0])
        for (i, j), comp in complement.items():
            inside = block[:, comp] <= pmin + 1e-12
            vals = np.where(inside, np.maximum(vals, np.sqrt(dA[i] * dB[j])), vals)
        out[lo:lo + chunk] = vals
    return out


def free_grid_max(nx=200, ny=200, neps=20):
    """Max of the quantifier over the free set on an (x, y, eps) grid."""
    xs = np.linspace(0.0, 1.0, nx)
    ys = np.linspace(0.0, 1.0, ny)
    es = np.linspace(0.0, 1.0, neps)
    X, Y, E = np.meshgrid(xs, ys, es, indexing="ij")
    x = X.ravel()
    y = Y.ravel()
    e = E.ravel()
    one = 1.0 - e
    P = np.empty((x.size, 4))
    P[:, 0] = one * x * y + e * 0.25
    P[:, 1] = one * x * (1.0 - y) + e * 0.25
    P[:, 2] = one * (1.0 - x) * y + e * 0.25
    P[:, 3] = one * (1.0 - x) * (1.0 - y) + e * 0.25
    return float(quantifier_grid(P).max())


def simplex_grid(resolution):
    """Barycentric grid over the 3-simplex of 2x2 joint distributions."""
    pts = []
    step = resolution
    for a in range(step + 1):
        for b in range(step + 1 - a):
            for c in range(step + 1 - a - b):
                d = step - a - b - c
                pts.append((a, b, c, d))
    return np.asarray(pts, dtype=float) / step
