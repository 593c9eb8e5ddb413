"""Small dense numerical kernels: eigenvalues, distances, means, minimizers.

Everything here is pure and reentrant; matrices are tiny (2x2 or 4x4 in
practice) so simplicity and bit-stable symmetry win over asymptotics.
"""

import math

import numpy as np

from .errors import UnsupportedGeometryError, ValidationError

HERMITICITY_TOL = 1e-12
JACOBI_OFFDIAG_TOL = 1e-12
_JACOBI_MAX_SWEEPS = 60


def _as_square_complex(H):
    A = np.asarray(H, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {A.shape}")
    return A


def eigvalsh(H, herm_tol=HERMITICITY_TOL):
    """Ascending real eigenvalues of a Hermitian matrix.

    Uses cyclic Jacobi sweeps (complex rotations) until the off-diagonal
    Frobenius norm drops below 1e-12; matrices here are at most 4x4.
    """
    A = _as_square_complex(H)
    scale = max(1.0, float(np.max(np.abs(A))))
    if np.max(np.abs(A - A.conj().T)) > herm_tol * scale:
        raise ValidationError("matrix is not Hermitian within tolerance")
    n = A.shape[0]
    if n == 1:
        return np.array([A[0, 0].real])
    A = A.copy()
    for _ in range(_JACOBI_MAX_SWEEPS):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += abs(A[p, q]) ** 2
        if math.sqrt(2.0 * off) <= JACOBI_OFFDIAG_TOL:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                g = abs(apq)
                if g <= JACOBI_OFFDIAG_TOL / (4.0 * n * n):
                    continue
                phase = apq / g
                alpha = A[p, p].real
                beta = A[q, q].real
                tau = (alpha - beta) / (2.0 * g)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = 1.0 / (tau - math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    if k == p or k == q:
                        continue
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = c * akp + s * np.conj(phase) * akq
                    A[k, q] = -s * phase * akp + c * akq
                    A[p, k] = np.conj(A[k, p])
                    A[q, k] = np.conj(A[k, q])
                A[p, p] = alpha * c * c + 2.0 * g * s * c + beta * s * s
                A[q, q] = alpha * s * s - 2.0 * g * s * c + beta * c * c
                A[p, q] = 0.0
                A[q, p] = 0.0
    return np.sort(np.real(np.diag(A)))


def trace_distance(A, B, trace_tol=1e-9):
    """Half the trace norm of A - B for unit-trace Hermitian matrices."""
    A = _as_square_complex(A)
    B = _as_square_complex(B)
    if A.shape != B.shape:
        raise ValidationError(f"dimension mismatch: {A.shape} vs {B.shape}")
    for M in (A, B):
        if abs(np.trace(M) - 1.0) > trace_tol:
            raise ValidationError("inputs must have unit trace")
    lam = eigvalsh(A - B)
    return 0.5 * float(np.sum(np.abs(lam)))


def geometric_mean(values):
    """(prod v_j)^(1/M) for nonnegative values, via mean of logarithms.

    Zero inputs short-circuit to zero (any free-section contact kills the
    product); all-equal inputs return the common value exactly.
    """
    vals = [float(v) for v in values]
    if not vals:
        raise ValidationError("geometric_mean of an empty list")
    for v in vals:
        if v < 0.0:
            raise ValidationError(f"geometric_mean needs nonnegative values, got {v}")
    if min(vals) == max(vals):
        return vals[0]
    if min(vals) == 0.0:
        return 0.0
    return math.exp(math.fsum(math.log(v) for v in vals) / len(vals))


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_COARSE_POINTS = 64


def minimize_1d(f, lo, hi, tol=1e-10):
    """Minimize a continuous scalar function on [lo, hi].

    A 64-point coarse scan locates the best bracket (the objectives we meet
    are piecewise linear, where pure golden-section can stall at a kink),
    then golden-section refines it to |argmin error| <= tol.
    Returns (argmin, min).
    """
    lo = float(lo)
    hi = float(hi)
    if not lo < hi:
        raise ValidationError(f"need lo < hi, got [{lo}, {hi}]")
    xs = np.linspace(lo, hi, _COARSE_POINTS)
    fs = [f(x) for x in xs]
    k = int(np.argmin(fs))
    a = xs[max(k - 1, 0)]
    b = xs[min(k + 1, _COARSE_POINTS - 1)]
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    xm = 0.5 * (a + b)
    fm = f(xm)
    # never return worse than the best coarse sample
    if fs[k] < fm:
        return float(xs[k]), float(fs[k])
    return float(xm), float(fm)


def project_onto_simplex(w):
    """Euclidean projection of w onto the probability simplex."""
    w = np.asarray(w, dtype=float)
    u = np.sort(w)[::-1]
    css = np.cumsum(u) - 1.0
    ks = np.arange(1, len(w) + 1)
    cond = u - css / ks > 0
    rho = ks[cond][-1]
    theta = css[cond][-1] / rho
    return np.maximum(w - theta, 0.0)


def _metric_value(delta, metric):
    if metric == "L2":
        return float(np.linalg.norm(delta))
    if metric == "L1":
        return float(np.sum(np.abs(delta)))
    if metric == "TV":
        return 0.5 * float(np.sum(np.abs(delta)))
    raise UnsupportedGeometryError(f"unknown metric {metric!r}")


def _metric_subgradient(delta, metric):
    # descent direction for metric(x - p) with respect to x; for L2 the
    # squared-distance gradient is used so steps anneal near the optimum
    if metric == "L2":
        return delta
    if metric == "L1":
        return np.sign(delta)
    if metric == "TV":
        return 0.5 * np.sign(delta)
    raise UnsupportedGeometryError(f"unknown metric {metric!r}")


def project_onto_polytope(p, vertices, metric="L2", improve_tol=1e-10, max_iter=100_000):
    """Closest point (in the given metric) of conv(vertices) to p.

    Projected subgradient descent on barycentric weights: uniform
    initialization, adaptive step with halving, stop once accepted steps
    improve by less than 1e-10 or the iteration cap is hit.
    Returns (closest_point, distance).
    """
    p = np.asarray(p, dtype=float)
    V = np.asarray(vertices, dtype=float)
    if V.ndim != 2 or V.shape[0] < 1:
        raise ValidationError("need at least one vertex")
    if V.shape[1] != p.shape[0]:
        raise ValidationError("vertex dimension does not match point")
    m = V.shape[0]
    if m == 1:
        return V[0].copy(), _metric_value(V[0] - p, metric)

    w = np.full(m, 1.0 / m)
    x = V.T @ w
    best_f = _metric_value(x - p, metric)
    best_w = w.copy()
    step = 1.0
    for _ in range(max_iter):
        x = V.T @ w
        g = V @ _metric_subgradient(x - p, metric)
        w_new = project_onto_simplex(w - step * g)
        f_new = _metric_value(V.T @ w_new - p, metric)
        if f_new < best_f - 1e-16:
            improvement = best_f - f_new
            best_f = f_new
            best_w = w_new
            w = w_new
            step *= 1.3
            # a tiny gain at an already-annealed step means convergence;
            # at a large step it only means the step scale was off
            if improvement < improve_tol and step < 1e-6:
                break
        else:
            step *= 0.5
            if step < 1e-14:
                break
    closest = V.T @ best_w
    return closest, best_f
