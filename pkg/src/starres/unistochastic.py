"""Witness of non-unistochasticity for 4x4 circulant bistochastic matrices.

A circulant bistochastic matrix is generated by one row (a, b, c, d) of
weights on the cyclic permutation powers. The auxiliary free set is the
union of two triangles inside the unistochastic set; distances to them have
closed forms |b - d| and |a - c|.

Metric choice: unhalved L1 on the generating row. At the tangent point
a = b = 1/4 + 1/(4*sqrt(2)), c = d = 1/4 - 1/(4*sqrt(2)) the geometric mean
of the two triangle distances must equal 1/(2*sqrt(2)) ~ 0.3536; candidate
metrics give
    L1 on the row          1/(2*sqrt(2))   (selected)
    TV (half L1) on row    1/(4*sqrt(2))   (rejected: halves the constant)
    L2 on the row          1/4             (rejected)
    L1 on the full matrix  sqrt(2)         (rejected: every row repeats the
                                            generating row's displacement)
The constant is re-derived by grid search in the acceptance suite.
"""

from dataclasses import dataclass

import numpy as np

from .core import (
    ConvexSection,
    Domain,
    PolyhedralCone,
    StarTheory,
    WitnessReport,
)
from .errors import ValidationError
from .numerics import geometric_mean

NU_CRITICAL = 1.0 / (2.0 * np.sqrt(2.0))

# triangle vertices in generating-row coordinates (weights on Pi^0..Pi^3)
F1_VERTICES = np.array([
    [1.0, 0.0, 0.0, 0.0],    # Pi^0
    [0.0, 0.0, 1.0, 0.0],    # Pi^2
    [0.0, 0.5, 0.0, 0.5],    # (Pi + Pi^3)/2
])
F2_VERTICES = np.array([
    [0.0, 1.0, 0.0, 0.0],    # Pi
    [0.0, 0.0, 0.0, 1.0],    # Pi^3
    [0.5, 0.0, 0.5, 0.0],    # (Pi^0 + Pi^2)/2
])

W4 = np.full(4, 0.25)


@dataclass(frozen=True)
class CirculantBistochastic:
    """B = a*Pi^0 + b*Pi + c*Pi^2 + d*Pi^3, stored as the generating row."""

    row: np.ndarray

    def __post_init__(self):
        row = np.asarray(self.row, dtype=float).reshape(4)
        if np.any(row < -1e-12):
            raise ValidationError("row entries must be nonnegative")
        if abs(row.sum() - 1.0) > 1e-12:
            raise ValidationError("row entries must sum to 1")
        object.__setattr__(self, "row", row)

    def matrix(self):
        a, b, c, d = self.row
        eye = np.eye(4)
        shift = np.roll(eye, 1, axis=1)  # Pi: cyclic permutation, row k = roll(row, k)
        return a * eye + b * shift + c * (shift @ shift) + d * (shift @ shift @ shift)


def from_matrix(B, tol=1e-9):
    """Validate a full 4x4 matrix as circulant bistochastic, return the row form."""
    B = np.asarray(B, dtype=float)
    if B.shape != (4, 4):
        raise ValidationError("expected a 4x4 matrix")
    row = B[0]
    for k in range(1, 4):
        if np.max(np.abs(B[k] - np.roll(row, k))) > tol:
            raise ValidationError("matrix is not circulant within tolerance")
    if np.max(np.abs(B.sum(axis=0) - 1.0)) > tol or np.max(np.abs(B.sum(axis=1) - 1.0)) > tol:
        raise ValidationError("matrix is not bistochastic within tolerance")
    return CirculantBistochastic(row=np.maximum(row, 0.0) / max(row.sum(), 1e-300))


def triangle_distance(B, which):
    """Minimal L1 distance of the generating row to triangle F1 or F2.

    F1 rows are (a', m, b', m) with m = (1 - a' - b')/2, so the distance is
    |b - d|; F2 rows are (m', a', m', b'), giving |a - c|.
    """
    a, b, c, d = B.row
    if which == "F1":
        return abs(b - d)
    if which == "F2":
        return abs(a - c)
    raise ValidationError("which must be 'F1' or 'F2'")


def nu_quantifier(B):
    """sqrt of the product of the two triangle distances.

    All four fortress cones share the same two free sections, so domain
    selection is irrelevant.
    """
    d1 = triangle_distance(B, "F1")
    d2 = triangle_distance(B, "F2")
    value = geometric_mean([d1, d2])
    return WitnessReport(
        value=value,
        domain_index=0,
        per_section=[d1, d2],
        margin=value - NU_CRITICAL,
        critical=NU_CRITICAL,
    )


def nu_witness(B):
    """nu_quantifier - 1/(2*sqrt(2)); positive rules out a unitary counterpart."""
    return nu_quantifier(B).value - NU_CRITICAL


def tangent_point():
    """Unistochastic tangent point on the line W4 <-> (Pi^0 + Pi)/2."""
    s = 1.0 / np.sqrt(2.0)
    return CirculantBistochastic(row=(1.0 - s) * W4 + s * np.array([0.5, 0.5, 0.0, 0.0]))


def nu_theory():
    """Engine form of the theory: four cones, both triangles as sections."""
    sections = (
        ConvexSection(label="F1", kind="polytope", params={"vertices": F1_VERTICES}, metric="L1"),
        ConvexSection(label="F2", kind="polytope", params={"vertices": F2_VERTICES}, metric="L1"),
    )
    mid_13 = np.array([0.0, 0.5, 0.0, 0.5])
    mid_02 = np.array([0.5, 0.0, 0.5, 0.0])
    domains = []
    for i in (0, 2):
        for j in (1, 3):
            ei = np.zeros(4)
            ei[i] = 1.0
            ej = np.zeros(4)
            ej[j] = 1.0
            frame = np.vstack([mid_13 - W4, ei - W4, mid_02 - W4, ej - W4])
            domains.append(Domain(cone=PolyhedralCone(apex=W4, frame=frame), sections=sections))
    return StarTheory(
        dim=4,
        kernel=np.vstack([mid_13, mid_02]),
        domains=tuple(domains),
        ambient=np.eye(4),
        critical=NU_CRITICAL,
        kernel_metric="L1",
    )


# ---------------------------------------------------------------------------
# phase-search oracle
# ---------------------------------------------------------------------------

def _unitarity_residual(phases, sqrtB):
    U = np.exp(1j * phases) * sqrtB
    G = U.conj().T @ U - np.eye(4)
    return float(np.sum(np.abs(G) ** 2))


def _phase_loss_grad(phases, sqrtB):
    U = np.exp(1j * phases) * sqrtB
    G = U.conj().T @ U - np.eye(4)
    loss = float(np.sum(np.abs(G) ** 2))
    grad = 4.0 * np.imag(np.conj(U) * (U @ G))
    return loss, grad


def unistochastic_oracle(B, restarts=50, seed=0, iters=300, polish=3):
    """Search phases making e^{i phi} o sqrt(B) unitary.

    Random-restart gradient descent on ||U^dag U - I||_F^2 (batched, with a
    quasi-Newton polish of the best candidates, which matters near the
    boundary of the unistochastic set where the landscape flattens). A
    residual below 1e-6 certifies the matrix unistochastic. Failure to find
    phases is reported as 'inconclusive', never as a non-unistochasticity
    verdict: only the witness certifies that direction.
    Returns (best_residual, verdict).
    """
    if restarts < 1:
        raise ValidationError("restarts must be >= 1")
    sqrtB = np.sqrt(np.maximum(B.matrix(), 0.0))
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(restarts, 4, 4))
    phases[0] = 0.0
    # gauge freedom: first row and column phases can be fixed to zero
    phases[:, 0, :] = 0.0
    phases[:, :, 0] = 0.0
    step = np.full(restarts, 0.05)
    S = sqrtB[None, :, :]
    U = np.exp(1j * phases) * S
    G = np.einsum("rji,rjk->rik", U.conj(), U) - np.eye(4)[None]
    loss = np.sum(np.abs(G) ** 2, axis=(1, 2))
    for _ in range(iters):
        UG = np.einsum("rij,rjk->rik", U, G)
        grad = 4.0 * np.imag(np.conj(U) * UG)
        grad[:, 0, :] = 0.0
        grad[:, :, 0] = 0.0
        cand = phases - step[:, None, None] * grad
        Uc = np.exp(1j * cand) * S
        Gc = np.einsum("rji,rjk->rik", Uc.conj(), Uc) - np.eye(4)[None]
        loss_c = np.sum(np.abs(Gc) ** 2, axis=(1, 2))
        better = loss_c < loss
        phases[better] = cand[better]
        U[better] = Uc[better]
        G[better] = Gc[better]
        loss[better] = loss_c[better]
        step[better] *= 1.2
        step[~better] *= 0.5
        step = np.clip(step, 1e-12, 1.0)
        if loss.min() < 1e-18:
            break

    from scipy.optimize import minimize

    free = np.ones((4, 4), dtype=bool)
    free[0, :] = False
    free[:, 0] = False

    def fg(x):
        P = np.zeros((4, 4))
        P[free] = x
        L, g = _phase_loss_grad(P, sqrtB)
        return L, g[free]

    best_loss = float(loss.min())
    order = np.argsort(loss)[: max(1, polish)]
    for r in order:
        out = minimize(fg, phases[r][free], jac=True, method="L-BFGS-B",
                       options={"maxiter": 2000, "ftol": 1e-18, "gtol": 1e-14})
        best_loss = min(best_loss, float(out.fun))
    best = float(np.sqrt(max(best_loss, 0.0)))
    verdict = "unistochastic" if best < 1e-6 else "inconclusive"
    return best, verdict


def barycentric_grid(resolution):
    """Grid over the circulant tetrahedron, rows (a, b, c, d)."""
    pts = []
    for a in range(resolution + 1):
        for b in range(resolution + 1 - a):
            for c in range(resolution + 1 - a - b):
                d = resolution - a - b - c
                pts.append((a, b, c, d))
    return np.asarray(pts, dtype=float) / resolution
