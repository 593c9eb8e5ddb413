"""Generic star-resource-theory engine.

Cones, convex free sections, domains, the geometric-mean monotone with its
bounds, generalized robustness, the universal free operations, sampled
fortress validation, and redundancy deletion.
"""

import itertools
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .errors import (
    CoverageError,
    InfeasibleError,
    UnsupportedGeometryError,
    ValidationError,
)
from .linprog import solve_lp
from .numerics import geometric_mean, minimize_1d, project_onto_polytope, _metric_value

DEFAULT_TOL = 1e-8


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolyhedralCone:
    """Cone {apex + sum_i alpha_i frame_i, alpha_i >= 0} in R^d."""

    apex: np.ndarray
    frame: np.ndarray  # shape (m, d)

    def __post_init__(self):
        apex = np.atleast_1d(np.asarray(self.apex, dtype=float))
        frame = np.atleast_2d(np.asarray(self.frame, dtype=float))
        if frame.shape[0] < 1:
            raise ValidationError("cone frame must be nonempty")
        if frame.shape[1] != apex.shape[0]:
            raise ValidationError("frame/apex dimension mismatch")
        norms = np.linalg.norm(frame, axis=1)
        if np.any(norms == 0.0):
            raise ValidationError("cone frame vectors must be nonzero")
        object.__setattr__(self, "apex", apex)
        object.__setattr__(self, "frame", frame)
        # cache: pseudo-inverse fast path is valid only for independent frames
        rank = np.linalg.matrix_rank(frame, tol=1e-10)
        object.__setattr__(self, "_independent", rank == frame.shape[0])
        object.__setattr__(self, "_pinv", np.linalg.pinv(frame.T))

    @property
    def dim(self):
        return self.apex.shape[0]


@dataclass(frozen=True)
class ConvexSection:
    """A convex free section with a distance contract.

    kind is one of:
      * "polytope": params["vertices"] (m, d)
      * "segment":  params["a"], params["b"]
      * "box":      params["center"], params["half_widths"], params["axes"]
                    (orthonormal rows); L2 metric only
      * "callable": params["distance"](point) -> float, optional
                    params["samples"](rng, n) -> points for sampled checks
    """

    label: str
    kind: str
    params: dict
    metric: str = "L2"

    def __post_init__(self):
        if self.kind not in ("polytope", "segment", "box", "callable"):
            raise UnsupportedGeometryError(f"unknown section kind {self.kind!r}")
        if self.kind == "box" and self.metric != "L2":
            raise UnsupportedGeometryError("box sections support the L2 metric only")

    def distance(self, point):
        if self.kind == "callable":
            return float(self.params["distance"](point))
        p = np.asarray(point, dtype=float)
        if self.kind == "polytope":
            _, d = project_onto_polytope(p, self.params["vertices"], self.metric)
            return d
        if self.kind == "segment":
            a = np.asarray(self.params["a"], dtype=float)
            b = np.asarray(self.params["b"], dtype=float)
            if self.metric == "L2":
                ab = b - a
                denom = float(ab @ ab)
                t = 0.0 if denom == 0.0 else float(np.clip((p - a) @ ab / denom, 0.0, 1.0))
                return _metric_value(a + t * ab - p, "L2")
            t, val = minimize_1d(lambda t: _metric_value(a + t * (b - a) - p, self.metric), 0.0, 1.0, tol=1e-12)
            return val
        # box: clamp coordinates along the axes, off-axis components add fully
        center = np.asarray(self.params["center"], dtype=float)
        hw = np.asarray(self.params["half_widths"], dtype=float)
        axes = np.atleast_2d(np.asarray(self.params["axes"], dtype=float))
        y = axes @ (p - center)
        residual = (p - center) - axes.T @ y
        over = np.maximum(np.abs(y) - hw, 0.0)
        return float(np.sqrt(residual @ residual + over @ over))

    def sample(self, rng, n):
        """n points of the section, extreme points first.

        Including the extreme points matters for the sampled fortress
        condition iv: sections may touch their cone only along a boundary
        face, which random interior draws would miss.
        """
        if self.kind == "callable":
            sampler = self.params.get("samples")
            if sampler is None:
                raise UnsupportedGeometryError(f"section {self.label!r} has no sampler")
            return np.asarray(sampler(rng, n), dtype=float)
        if self.kind == "polytope":
            V = np.asarray(self.params["vertices"], dtype=float)
            w = rng.dirichlet(np.ones(V.shape[0]), size=n)
            return np.vstack([V, w @ V])
        if self.kind == "segment":
            a = np.asarray(self.params["a"], dtype=float)
            b = np.asarray(self.params["b"], dtype=float)
            t = np.concatenate([[0.0, 1.0], rng.uniform(0.0, 1.0, size=n)])
            return a[None, :] + t[:, None] * (b - a)[None, :]
        center = np.asarray(self.params["center"], dtype=float)
        hw = np.asarray(self.params["half_widths"], dtype=float)
        axes = np.atleast_2d(np.asarray(self.params["axes"], dtype=float))
        k = len(hw)
        corners = np.array(list(itertools.product((-1.0, 1.0), repeat=k)))
        y = np.vstack([corners, rng.uniform(-1.0, 1.0, size=(n, k))]) * hw
        return center[None, :] + y @ axes


@dataclass(frozen=True)
class Domain:
    """A cone together with its free sections."""

    cone: PolyhedralCone
    sections: tuple

    def __post_init__(self):
        if len(self.sections) == 0:
            raise ValidationError("domain needs at least one section")
        object.__setattr__(self, "sections", tuple(self.sections))


@dataclass(frozen=True)
class StarTheory:
    """A star resource theory instance in a linear real representation."""

    dim: int
    kernel: np.ndarray          # (k, d) kernel generators
    domains: tuple
    ambient: np.ndarray = None  # polytope of valid objects, used for sampling
    critical: float = 0.0
    kernel_metric: str = "L2"
    kernel_distance_fn: object = None   # overrides polytope kernel distance
    point_distance_fn: object = None    # metric between raw points, for sampling checks

    def __post_init__(self):
        kernel = np.atleast_2d(np.asarray(self.kernel, dtype=float))
        if kernel.shape[0] < 1:
            raise ValidationError("kernel must be nonempty")
        object.__setattr__(self, "kernel", kernel)
        object.__setattr__(self, "domains", tuple(self.domains))
        if len(self.domains) == 0:
            raise ValidationError("theory needs at least one domain")
        if self.ambient is not None:
            object.__setattr__(self, "ambient", np.atleast_2d(np.asarray(self.ambient, dtype=float)))

    def kernel_distance(self, point):
        if self.kernel_distance_fn is not None:
            return float(self.kernel_distance_fn(point))
        _, d = project_onto_polytope(np.asarray(point, dtype=float), self.kernel, self.kernel_metric)
        return d


@dataclass
class WitnessReport:
    """Quantifier value plus the evidence behind it."""

    value: float
    domain_index: int
    per_section: list
    margin: float
    critical: float

    def to_dict(self):
        return {
            "value": self.value,
            "domain_index": self.domain_index,
            "per_section": list(self.per_section),
            "margin": self.margin,
            "critical": self.critical,
        }


# ---------------------------------------------------------------------------
# cone operations
# ---------------------------------------------------------------------------

def cone_contains(cone, point, tol=DEFAULT_TOL):
    """True iff point - apex lies in the nonnegative span of the frame.

    Solved as a nonnegative least-squares feasibility problem with residual
    <= tol; independent frames take a direct least-squares fast path.
    """
    p = np.asarray(point, dtype=float)
    if p.shape[0] != cone.dim:
        raise ValidationError("point/cone dimension mismatch")
    rhs = p - cone.apex
    if cone._independent:
        coef = cone._pinv @ rhs
        residual = np.linalg.norm(cone.frame.T @ coef - rhs)
        return bool(residual <= tol and np.all(coef >= -tol))
    coef, residual = nnls(cone.frame.T, rhs)
    return bool(residual <= tol)


def cone_contains_batch(cone, points, tol=DEFAULT_TOL):
    """Vectorized cone_contains over an (n, d) array of points."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    rhs = P - cone.apex[None, :]
    if cone._independent:
        coef = rhs @ cone._pinv.T
        residual = np.linalg.norm(coef @ cone.frame - rhs, axis=1)
        return (residual <= tol) & np.all(coef >= -tol, axis=1)
    return np.array([cone_contains(cone, p, tol) for p in P])


def cone_coefficients(cone, point, tol=DEFAULT_TOL):
    """Nonnegative frame coefficients of point - apex (residual <= tol)."""
    p = np.asarray(point, dtype=float)
    rhs = p - cone.apex
    if cone._independent:
        coef = cone._pinv @ rhs
        residual = np.linalg.norm(cone.frame.T @ coef - rhs)
        if residual <= tol and np.all(coef >= -tol):
            return np.maximum(coef, 0.0)
        raise ValidationError("point is not in the cone (no nonnegative span)")
    coef, residual = nnls(cone.frame.T, rhs)
    if residual > tol:
        raise ValidationError("point is not in the cone (no nonnegative span)")
    return coef


def reflect_cone(cone):
    """Same apex, negated frame."""
    return PolyhedralCone(apex=cone.apex, frame=-cone.frame)


# ---------------------------------------------------------------------------
# monotone
# ---------------------------------------------------------------------------

def section_distance(theta, section):
    """Infimum of the section's metric over the section."""
    return section.distance(theta)


def g_domain(theta, domain):
    """Geometric mean of the section distances of one domain."""
    return geometric_mean([section_distance(theta, s) for s in domain.sections])


def containing_domains(theta, theory, tol=DEFAULT_TOL):
    idx = []
    for i, dom in enumerate(theory.domains):
        if cone_contains(dom.cone, theta, tol):
            idx.append(i)
            continue
        if any(section_distance(theta, s) <= tol for s in dom.sections):
            idx.append(i)
    return idx


def g_monotone(theta, theory, tol=DEFAULT_TOL):
    """Supremum of g_domain over the domains containing theta.

    Ties break to the lowest domain index (equal values sit on symmetry
    hyperplanes, so the tie is benign).
    """
    idx = containing_domains(theta, theory, tol)
    if not idx:
        raise CoverageError("theta lies outside every domain: fortress covering is violated")
    best_value = -1.0
    best_i = -1
    best_sections = None
    for i in idx:
        dists = [section_distance(theta, s) for s in theory.domains[i].sections]
        val = geometric_mean(dists)
        if val > best_value + 1e-15:
            best_value = val
            best_i = i
            best_sections = dists
    return WitnessReport(
        value=best_value,
        domain_index=best_i,
        per_section=best_sections,
        margin=best_value - theory.critical,
        critical=theory.critical,
    )


def g_monotone_orbit(theta, theory, operations, tol=DEFAULT_TOL):
    """Max of g_monotone over a finite, user-supplied list of free operations.

    The closed operation set of the general theory has no constructive
    enumeration, so only explicit orbits are supported.
    """
    best = None
    for op in operations:
        rep = g_monotone(op(theta), theory, tol)
        if best is None or rep.value > best.value:
            best = rep
    if best is None:
        raise ValidationError("empty operation list")
    return best


def monotone_bounds(theta, theory, tol=DEFAULT_TOL):
    """(lower, upper) with lower = min section distance, upper = kernel distance."""
    idx = containing_domains(theta, theory, tol)
    if not idx:
        raise CoverageError("theta lies outside every domain")
    lower = min(
        section_distance(theta, s)
        for i in idx
        for s in theory.domains[i].sections
    )
    # the decomposition infimum ranges over every section of the theory
    seen = set()
    for dom in theory.domains:
        for s in dom.sections:
            if s.label in seen:
                continue
            seen.add(s.label)
            lower = min(lower, section_distance(theta, s))
    upper = theory.kernel_distance(theta)
    return lower, upper


# ---------------------------------------------------------------------------
# robustness
# ---------------------------------------------------------------------------

def robustness(theta, section, ambient_vertices):
    """Generalized robustness of theta relative to a polytopal section.

    min r >= 0 with (theta + r*Lambda)/(1+r) in the section for some Lambda
    in the ambient polytope; a linear program in the joint barycentric
    weights, solved by a dense simplex.
    """
    if isinstance(section, ConvexSection):
        if section.kind != "polytope":
            raise UnsupportedGeometryError("robustness needs a polytopal section")
        S = np.asarray(section.params["vertices"], dtype=float)
    else:
        S = np.atleast_2d(np.asarray(section, dtype=float))
    A = np.atleast_2d(np.asarray(ambient_vertices, dtype=float))
    theta = np.asarray(theta, dtype=float)
    if S.shape[0] < 1:
        raise InfeasibleError("empty section")
    d = theta.shape[0]
    nA, nS = A.shape[0], S.shape[0]
    # variables: mu (ambient weights * r), nu (section weights * (1+r))
    # S^T nu - A^T mu = theta ; sum(nu) - sum(mu) = 1 ; minimize sum(mu)
    M = np.zeros((d + 1, nA + nS))
    M[:d, :nA] = -A.T
    M[:d, nA:] = S.T
    M[d, :nA] = -1.0
    M[d, nA:] = 1.0
    b = np.concatenate([theta, [1.0]])
    c = np.concatenate([np.ones(nA), np.zeros(nS)])
    x, val = solve_lp(c, M, b)
    return max(val, 0.0)


def g_robustness(theta, domain, ambient_vertices):
    """Geometric mean of per-section generalized robustness."""
    vals = []
    for s in domain.sections:
        if s.kind != "polytope":
            raise UnsupportedGeometryError("g_robustness needs polytopal sections")
        vals.append(robustness(theta, s, ambient_vertices))
    return geometric_mean(vals)


def relative_error_factor(sigma):
    """Error-suppression factor 1/sqrt(sigma) for sigma free sections."""
    if int(sigma) != sigma or sigma < 1:
        raise ValidationError("sigma must be an integer >= 1")
    return 1.0 / np.sqrt(float(sigma))


# ---------------------------------------------------------------------------
# free operations
# ---------------------------------------------------------------------------

def shrink_to_kernel(theta, lam, delta, kernel=None, tol=DEFAULT_TOL):
    """lam * theta + (1 - lam) * delta with delta a kernel point."""
    if not 0.0 <= lam <= 1.0:
        raise ValidationError("lambda must lie in [0, 1]")
    theta = np.asarray(theta, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if kernel is not None:
        _, dist = project_onto_polytope(delta, np.atleast_2d(np.asarray(kernel, dtype=float)), "L2")
        if dist > tol:
            raise ValidationError("delta is not a kernel point")
    return lam * theta + (1.0 - lam) * delta


def hyperbolic_contraction(theta, cone, lambdas, tol=DEFAULT_TOL):
    """Unequal scaling of the frame coefficients of theta within a cone.

    Requires prod of the positive lambdas <= 1; coefficients are recovered by
    nonnegative least squares with residual <= 1e-8 (degenerate frames fall
    back to the minimal-norm recovery nnls provides).
    """
    lambdas = np.asarray(lambdas, dtype=float)
    if lambdas.shape[0] != cone.frame.shape[0]:
        raise ValidationError("one lambda per frame vector required")
    if np.any(lambdas < 0.0):
        raise ValidationError("lambdas must be nonnegative")
    positive = lambdas[lambdas > 0.0]
    if positive.size and float(np.prod(positive)) > 1.0 + 1e-12:
        raise ValidationError("product of positive lambdas must not exceed 1")
    coef = cone_coefficients(cone, theta, tol=max(tol, 1e-8))
    return cone.apex + (coef * lambdas) @ cone.frame


# ---------------------------------------------------------------------------
# fortress validation
# ---------------------------------------------------------------------------

@dataclass
class FortressReport:
    passed: bool
    conditions: dict = field(default_factory=dict)
    counterexamples: dict = field(default_factory=dict)
    cover_matrix: np.ndarray = None
    free_mask: np.ndarray = None
    samples: np.ndarray = None

    def to_dict(self):
        return {
            "passed": self.passed,
            "conditions": dict(self.conditions),
            "counterexamples": {k: np.asarray(v).tolist() for k, v in self.counterexamples.items()},
        }


def _sample_ambient(theory, rng, n):
    if theory.ambient is None:
        raise ValidationError("theory has no ambient region to sample")
    V = theory.ambient
    if V.shape[0] == 2 and V.shape[1] == theory.dim:
        # two rows are read as box bounds (lo, hi)
        lo, hi = V[0], V[1]
        if np.all(hi >= lo) and np.any(hi > lo):
            return rng.uniform(lo, hi, size=(n, theory.dim))
    w = rng.dirichlet(np.ones(V.shape[0]), size=n)
    return w @ V


def _strictly_inside(cone, point, tol, probe_scale):
    """Sampled relative-interior test: probe along +-frame directions."""
    if not cone_contains(cone, point, tol):
        return False
    probes = []
    for f in cone.frame:
        nf = f / np.linalg.norm(f)
        probes.append(nf)
        probes.append(-nf)
    for probe in probes:
        if not cone_contains(cone, np.asarray(point) + probe_scale * probe, tol):
            return False
    return True


def validate_fortress(theory, free_membership, n_samples=10_000, seed=0, tol=DEFAULT_TOL, section_samples=64):
    """Sampled check of the four fortress conditions.

    i)   every ambient sample is free or inside some cone;
    ii)  no free sample lies strictly inside any cone;
    iii) every kernel generator lies in every reflected cone;
    iv)  sampled points of each section touch the section's own cone.

    Failures are reported with counterexamples, never raised.
    """
    if n_samples < 1:
        raise ValidationError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    samples = _sample_ambient(theory, rng, n_samples)
    ncones = len(theory.domains)

    cover = np.zeros((n_samples, ncones), dtype=bool)
    for i, dom in enumerate(theory.domains):
        cover[:, i] = cone_contains_batch(dom.cone, samples, tol)
    free_mask = np.array([bool(free_membership(p)) for p in samples])

    conditions = {}
    counterexamples = {}

    uncovered = ~(free_mask | cover.any(axis=1))
    conditions["i"] = not bool(uncovered.any())
    if uncovered.any():
        counterexamples["i"] = samples[uncovered][:5]

    # free points: ambient samples that are free, plus explicit section samples
    scale = float(np.max(np.abs(samples))) if samples.size else 1.0
    probe_scale = max(1e-6, 1e-5 * scale)
    free_points = [samples[free_mask]]
    section_points = {}
    for i, dom in enumerate(theory.domains):
        for j, sec in enumerate(dom.sections):
            pts = sec.sample(rng, section_samples)
            section_points[(i, j)] = pts
            free_points.append(pts)
    free_points = np.vstack([fp for fp in free_points if len(fp)]) if any(len(fp) for fp in free_points) else np.empty((0, theory.dim))

    bad_ii = []
    for p in free_points:
        for dom in theory.domains:
            if _strictly_inside(dom.cone, p, tol, probe_scale):
                bad_ii.append(p)
                break
        if len(bad_ii) >= 5:
            break
    conditions["ii"] = len(bad_ii) == 0
    if bad_ii:
        counterexamples["ii"] = np.asarray(bad_ii)

    bad_iii = []
    for dom in theory.domains:
        refl = reflect_cone(dom.cone)
        for k in theory.kernel:
            if not cone_contains(refl, k, tol):
                bad_iii.append(k)
    conditions["iii"] = len(bad_iii) == 0
    if bad_iii:
        counterexamples["iii"] = np.asarray(bad_iii[:5])

    bad_iv = []
    for i, dom in enumerate(theory.domains):
        for j, _ in enumerate(dom.sections):
            pts = section_points[(i, j)]
            touched = cone_contains_batch(dom.cone, pts, max(tol, 1e-6))
            if not touched.any():
                bad_iv.append((i, j))
    conditions["iv"] = len(bad_iv) == 0
    if bad_iv:
        counterexamples["iv"] = np.asarray(bad_iv)

    return FortressReport(
        passed=all(conditions.values()),
        conditions=conditions,
        counterexamples=counterexamples,
        cover_matrix=cover,
        free_mask=free_mask,
        samples=samples,
    )


# ---------------------------------------------------------------------------
# redundancy deletion
# ---------------------------------------------------------------------------

def redundancy_deletion(sets, K, n_samples=256, seed=0, tol=DEFAULT_TOL):
    """Keep exactly the members whose intersection with K is inclusion-maximal.

    Containment is tested on sampled intersection points; duplicates keep the
    first representative and the output preserves input order.
    """
    sets = [np.atleast_2d(np.asarray(S, dtype=float)) for S in sets]
    K = np.atleast_2d(np.asarray(K, dtype=float))
    rng = np.random.default_rng(seed)

    def in_polytope(points, P):
        out = []
        for p in points:
            _, d = project_onto_polytope(p, P, "L2")
            out.append(d <= tol)
        return np.asarray(out)

    inter_samples = []
    for S in sets:
        w = rng.dirichlet(np.ones(S.shape[0]), size=n_samples)
        pts = w @ S
        pts = np.vstack([pts, S])  # include vertices, they often carry the extremes
        pts = pts[in_polytope(pts, K)]
        inter_samples.append(pts)

    n = len(sets)
    subset = np.zeros((n, n), dtype=bool)  # subset[a, b]: A_a cap K  <=  A_b cap K
    for a in range(n):
        for b in range(n):
            if a == b:
                subset[a, b] = True
                continue
            if len(inter_samples[a]) == 0:
                subset[a, b] = True
                continue
            subset[a, b] = bool(np.all(in_polytope(inter_samples[a], sets[b])))

    keep = []
    for a in range(n):
        dominated = False
        for b in range(n):
            if a == b:
                continue
            if subset[a, b] and not subset[b, a]:
                dominated = True
                break
            if subset[a, b] and subset[b, a] and b < a:
                dominated = True  # duplicate: first representative wins
                break
        if not dominated:
            keep.append(sets[a])
    return keep


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def theory_to_json(theory):
    """Serialize a StarTheory with geometric (non-callable) sections."""
    domains = []
    for dom in theory.domains:
        sections = []
        for s in dom.sections:
            if s.kind == "callable":
                raise UnsupportedGeometryError("callable sections are not serializable")
            params = {k: np.asarray(v, dtype=float).tolist() for k, v in s.params.items()}
            sections.append({"label": s.label, "kind": s.kind, "params": params, "metric": s.metric})
        domains.append({
            "apex": dom.cone.apex.tolist(),
            "frame": dom.cone.frame.tolist(),
            "sections": sections,
        })
    doc = {
        "dim": theory.dim,
        "kernel": theory.kernel.tolist(),
        "critical": theory.critical,
        "kernel_metric": theory.kernel_metric,
        "domains": domains,
    }
    if theory.ambient is not None:
        doc["ambient"] = theory.ambient.tolist()
    return json.dumps(doc)


def theory_from_json(text):
    doc = json.loads(text)
    domains = []
    for dd in doc["domains"]:
        cone = PolyhedralCone(apex=np.asarray(dd["apex"]), frame=np.asarray(dd["frame"]))
        sections = tuple(
            ConvexSection(
                label=sd["label"],
                kind=sd["kind"],
                params={k: np.asarray(v) for k, v in sd["params"].items()},
                metric=sd["metric"],
            )
            for sd in dd["sections"]
        )
        domains.append(Domain(cone=cone, sections=sections))
    return StarTheory(
        dim=int(doc["dim"]),
        kernel=np.asarray(doc["kernel"]),
        domains=tuple(domains),
        ambient=np.asarray(doc["ambient"]) if "ambient" in doc else None,
        critical=float(doc.get("critical", 0.0)),
        kernel_metric=doc.get("kernel_metric", "L2"),
    )
