"""Command-line front end: witness evaluation, figure-data sweeps,
validation suites, and the discrimination-game simulator.

Exit codes: 0 success, 2 witness positive (resource certified), 64 malformed
input, 65 unsupported size, 73 unwritable output, 1 validation failure.
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import discord, games, markov, totalcorr, unistochastic
from .core import validate_fortress
from .errors import StarResError, UnsupportedInputError, ValidationError
from .quantum import TwoQubitFano, fano_from_json

EXIT_OK = 0
EXIT_WITNESS_POSITIVE = 2
EXIT_BAD_INPUT = 64
EXIT_UNSUPPORTED = 65
EXIT_UNWRITABLE = 73

APPS = ("discord", "totalcorr", "unisto", "markov")
SUITES = ("geometry", "discord", "totalcorr", "unisto", "markov", "games", "all")


@dataclass
class RunConfig:
    command: str
    input: str = None
    output: str = None
    tol: float = 1e-8
    resolution: int = 50
    seed: int = 0
    workers: int = 1
    format: str = None

    def __post_init__(self):
        if self.resolution < 2:
            raise ValidationError("resolution must be >= 2")
        if self.tol <= 0.0:
            raise ValidationError("tolerance must be positive")


def _default_workers():
    env = os.environ.get("STARRES_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _read_input(raw, fmt=None):
    """Parse --input as inline JSON, a JSON file, or a CSV matrix."""
    if raw is None:
        raise ValidationError("missing --input")
    text = raw.strip()
    if text.startswith("{") or text.startswith("["):
        return json.loads(text)
    if not os.path.exists(raw):
        raise ValidationError(f"input file not found: {raw}")
    if fmt == "csv" or (fmt is None and raw.lower().endswith(".csv")):
        return np.loadtxt(raw, delimiter=",", ndmin=2).tolist()
    with open(raw) as fh:
        return json.load(fh)


def _choi_to_mixture(J, tol):
    """Recover (a, b, c) from a 4x4 Choi matrix with the mixture structure."""
    J = np.asarray(J, dtype=complex)
    if J.shape != (4, 4):
        raise ValidationError("Choi matrix must be 4x4")
    pattern_zero = [(0, 1), (0, 2), (1, 0), (2, 0), (1, 3), (2, 3), (3, 1), (3, 2)]
    for r, cidx in pattern_zero:
        if abs(J[r, cidx]) > tol:
            raise ValidationError("matrix lacks the Pauli-mixture Choi structure")
    checks = [
        abs(J[0, 0] - J[3, 3]), abs(J[1, 1] - J[2, 2]),
        abs(J[0, 3] - J[3, 0]), abs(J[1, 2] - J[2, 1]),
        abs(np.trace(J) - 1.0),
    ]
    if max(checks) > tol:
        raise ValidationError("matrix lacks the Pauli-mixture Choi structure")
    c = float(4.0 * J[0, 0].real - 1.0)
    apb = float(4.0 * J[1, 1].real)
    amb = float(4.0 * J[1, 2].real)
    a = (apb + amb) / 2.0
    b = (apb - amb) / 2.0
    if abs(a + b + c - 1.0) > 10 * tol:
        raise ValidationError("Choi entries do not describe a normalized mixture")
    return markov.PauliHalfMixture(a, b, c)


def _witness_report(app, payload, tol):
    if app == "discord":
        state = fano_from_json(payload) if isinstance(payload, dict) else TwoQubitFano(
            x=np.zeros(3), y=np.zeros(3), T=np.diag(np.asarray(payload, dtype=float).reshape(3)))
        return discord.discord_quantifier(state)
    if app == "totalcorr":
        mat = payload["p"] if isinstance(payload, dict) else payload
        dist = totalcorr.JointDistribution(p=np.asarray(mat, dtype=float))
        if dist.n_A != 2 or dist.n_B != 2:
            raise UnsupportedInputError("critical constant proven for 2x2 outputs only")
        return totalcorr.tc_quantifier(dist)
    if app == "unisto":
        arr = np.asarray(payload["row"] if isinstance(payload, dict) and "row" in payload else payload, dtype=float)
        if arr.shape == (4,):
            B = unistochastic.CirculantBistochastic(row=arr)
        else:
            B = unistochastic.from_matrix(arr, tol=max(tol, 1e-9))
        return unistochastic.nu_quantifier(B)
    if app == "markov":
        if isinstance(payload, dict):
            m = markov.PauliHalfMixture(a=float(payload["a"]), b=float(payload["b"]), c=float(payload["c"]))
        else:
            arr = np.asarray(payload, dtype=float)
            if arr.shape == (3,):
                m = markov.PauliHalfMixture(*arr)
            else:
                m = _choi_to_mixture(arr, tol=max(tol, 1e-9))
        return markov.markov_quantifier(m)
    raise ValidationError(f"unknown app {app!r}")


def cmd_witness(cfg, app):
    payload = _read_input(cfg.input, cfg.format)
    report = _witness_report(app, payload, cfg.tol)
    text = json.dumps(report.to_dict(), indent=2)
    if cfg.output:
        _write_text(cfg.output, text + "\n")
    else:
        print(text)
    return EXIT_WITNESS_POSITIVE if report.margin > 0.0 else EXIT_OK


def _write_text(path, text):
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise _Unwritable(str(exc))


class _Unwritable(Exception):
    pass


def _csv_lines(header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format(v, ".12g") for v in row))
    return "\n".join(lines) + "\n"


def _chunked_parallel(points, func, workers):
    if workers <= 1 or points.shape[0] < 4 * workers:
        return func(points)
    import multiprocessing as mp

    chunks = np.array_split(points, workers)
    with mp.Pool(workers) as pool:
        parts = pool.map(func, chunks)
    return np.concatenate(parts)


def cmd_sweep(cfg, app):
    res = cfg.resolution
    if app == "discord":
        rows = discord.bell_grid(res)
        text = _csv_lines(["t1", "t2", "t3", "value"], rows)
    elif app == "totalcorr":
        pts = totalcorr.simplex_grid(res)
        vals = _chunked_parallel(pts, totalcorr.quantifier_grid, cfg.workers)
        witness = vals - totalcorr.TC_CRITICAL
        text = _csv_lines(["p00", "p01", "p10", "p11", "value", "witness"],
                          np.column_stack([pts, vals, witness]))
    elif app == "unisto":
        pts = unistochastic.barycentric_grid(res)
        vals = np.sqrt(np.abs(pts[:, 1] - pts[:, 3]) * np.abs(pts[:, 0] - pts[:, 2]))
        witness = vals - unistochastic.NU_CRITICAL
        text = _csv_lines(["a", "b", "c", "d", "value", "witness"],
                          np.column_stack([pts, vals, witness]))
    elif app == "markov":
        pts = []
        for i in range(res + 1):
            for j in range(res + 1 - i):
                pts.append((i, j, res - i - j))
        pts = np.asarray(pts, dtype=float) / res
        vals = _chunked_parallel(pts, markov.quantifier_grid, cfg.workers)
        witness = vals - markov.MARKOV_CRITICAL
        text = _csv_lines(["a", "b", "c", "value", "witness"],
                          np.column_stack([pts, vals, witness]))
    else:
        raise ValidationError(f"unknown app {app!r}")
    if cfg.output:
        _write_text(cfg.output, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# validation suites
# ---------------------------------------------------------------------------

def _check(name, passed, detail=""):
    return {"name": name, "passed": bool(passed), "detail": str(detail)}


def _suite_geometry(seed, fixture="default"):
    checks = []
    theory = discord.discord_theory(np.zeros(3))
    if fixture == "broken":
        from .core import StarTheory
        theory = StarTheory(
            dim=theory.dim, kernel=theory.kernel, domains=theory.domains[1:],
            ambient=theory.ambient, critical=theory.critical,
        )
    free = _discord_free_membership(np.zeros(3))
    rep = validate_fortress(theory, free, n_samples=2000, seed=seed, section_samples=16)
    detail = rep.to_dict()["counterexamples"] if not rep.passed else ""
    checks.append(_check("discord_fortress_i_iv", rep.passed, detail))

    from .core import robustness
    ambient = np.array([[1.0, 0.0], [0.0, 1.0]])
    section = np.array([[0.5, 0.5], [1.0, 0.0]])
    r = robustness(np.array([0.0, 1.0]), section, ambient)
    checks.append(_check("robustness_lp_known_value", abs(r - 1.0) < 1e-9, f"r={r}"))

    from .numerics import project_onto_polytope
    pt, d = project_onto_polytope(np.array([2.0, 0.0]), np.array([[0.0, 0.0], [1.0, 0.0]]), "L2")
    checks.append(_check("polytope_projection_segment", abs(d - 1.0) < 1e-9 and abs(pt[0] - 1.0) < 1e-8, f"d={d}"))
    return checks


def _discord_free_membership(y, tol=1e-9):
    hu = (1.0 + np.asarray(y)) / np.sqrt(2.0)
    hv = (1.0 - np.asarray(y)) / np.sqrt(2.0)

    def member(p):
        u, v = p[:3], p[3:]
        for i in range(3):
            others = [j for j in range(3) if j != i]
            if all(abs(u[j]) <= tol and abs(v[j]) <= tol for j in others):
                if abs(u[i]) <= hu[i] + tol and abs(v[i]) <= hv[i] + tol:
                    return True
        return False

    return member


def _suite_discord(seed):
    rng = np.random.default_rng(seed)
    checks = []
    worst = 0.0
    for _ in range(50):
        # |t_i| <= 1/3 keeps every draw inside the state tetrahedron
        t = rng.uniform(-1.0, 1.0, size=3) / 3.0
        state = TwoQubitFano(x=np.zeros(3), y=np.zeros(3), T=np.diag(t))
        closed = discord.discord_quantifier(state).value
        engine = discord.quantifier_via_engine(state).value
        worst = max(worst, abs(closed - engine))
    checks.append(_check("closed_form_vs_engine", worst < 1e-8, f"max|diff|={worst:.2e}"))

    worst = 0.0
    for _ in range(50):
        t = rng.uniform(-1.0, 1.0, size=3) / 3.0
        state = TwoQubitFano(x=np.zeros(3), y=np.zeros(3), T=np.diag(t))
        base = discord.discord_quantifier(state).value
        for kind in discord.FREE_OP_KINDS:
            lam = rng.uniform(0.0, 1.0)
            after = discord.discord_quantifier(discord.discord_free_op(state, kind, lam)).value
            worst = max(worst, after - base)
    checks.append(_check("free_ops_monotone", worst <= 1e-9, f"max increase={worst:.2e}"))
    return checks


def _suite_totalcorr(seed):
    rng = np.random.default_rng(seed)
    checks = []
    m = totalcorr.free_grid_max(60, 60, 10)
    checks.append(_check("critical_value_grid", abs(m - 1.0 / 16.0) < 2e-3, f"max={m:.6f}"))
    worst = -1.0
    for _ in range(200):
        x, y, e = rng.uniform(0, 1, 3)
        dist = totalcorr.free_point(x, y, e)
        worst = max(worst, totalcorr.tc_witness(dist))
    checks.append(_check("soundness_free_points", worst <= 1e-9, f"max witness={worst:.2e}"))
    return checks


def _suite_unisto(seed):
    checks = []
    val = unistochastic.nu_quantifier(unistochastic.tangent_point()).value
    checks.append(_check("tangent_point_value", abs(val - unistochastic.NU_CRITICAL) < 1e-9, f"{val:.9f}"))
    res, verdict = unistochastic.unistochastic_oracle(
        unistochastic.CirculantBistochastic(row=unistochastic.W4), restarts=8, seed=seed)
    checks.append(_check("w4_oracle_unistochastic", verdict == "unistochastic", f"residual={res:.2e}"))
    return checks


def _suite_markov(seed):
    checks = []
    d = markov.segment_distance(markov.focus_channel(1), 2)
    checks.append(_check("focus_distance", abs(d - markov.MARKOV_CRITICAL) < 1e-8, f"{d:.10f}"))
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(20):
        w = rng.dirichlet(np.ones(3))
        for j in (1, 2, 3):
            a = markov.segment_distance(w, j)
            b = float(markov.segment_distance_closed(w[None, :], j)[0])
            worst = max(worst, abs(a - b))
    checks.append(_check("closed_form_vs_minimizer", worst < 1e-9, f"max|diff|={worst:.2e}"))
    return checks


def _suite_games(seed):
    rng = np.random.default_rng(seed)
    checks = []
    ok = True
    for _ in range(20):
        rs = rng.uniform(0.0, 3.0, size=rng.integers(1, 7))
        if abs(games.harsanyi_dividend(rs) - float(np.prod(rs))) > 1e-12:
            ok = False
    checks.append(_check("dividend_equals_product", ok))
    Ls = [0.5, 0.5]
    emp = games.simulate_gi_game(Ls, trials=200_000, seed=seed)
    ana = games.xor_even_probability(Ls)
    sigma = np.sqrt(ana * (1 - ana) / 200_000)
    checks.append(_check("xor_identity_simulation", abs(emp - ana) < 4 * sigma, f"emp={emp:.5f} ana={ana:.5f}"))
    return checks


def cmd_validate(cfg, suite, fixture="default"):
    table = {
        "geometry": lambda: _suite_geometry(cfg.seed, fixture),
        "discord": lambda: _suite_discord(cfg.seed),
        "totalcorr": lambda: _suite_totalcorr(cfg.seed),
        "unisto": lambda: _suite_unisto(cfg.seed),
        "markov": lambda: _suite_markov(cfg.seed),
        "games": lambda: _suite_games(cfg.seed),
    }
    names = list(table) if suite == "all" else [suite]
    result = {}
    all_passed = True
    for name in names:
        checks = table[name]()
        passed = all(c["passed"] for c in checks)
        all_passed &= passed
        result[name] = {"passed": passed, "checks": checks}
    text = json.dumps({"passed": all_passed, "suites": result}, indent=2)
    if cfg.output:
        _write_text(cfg.output, text + "\n")
    else:
        print(text)
    return EXIT_OK if all_passed else 1


def cmd_game_sim(cfg, ls_text, trials):
    Ls = [float(v) for v in ls_text.split(",") if v.strip() != ""]
    analytic = games.xor_even_probability(Ls)
    empirical = games.simulate_gi_game(Ls, trials=trials, seed=cfg.seed)
    stderr = float(np.sqrt(max(analytic * (1.0 - analytic), 1e-300) / trials))
    doc = {"analytic": analytic, "empirical": empirical, "stderr": stderr,
           "trials": trials, "seed": cfg.seed}
    text = json.dumps(doc, indent=2)
    if cfg.output:
        _write_text(cfg.output, text + "\n")
    else:
        print(text)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="starres", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--input", "-i")
        p.add_argument("--output", "-o")
        p.add_argument("--tol", type=float, default=1e-8)
        p.add_argument("--resolution", type=int, default=50)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--format", choices=["json", "csv"])

    pw = sub.add_parser("witness", help="evaluate a witness on one object")
    pw.add_argument("app", choices=APPS)
    common(pw)

    ps = sub.add_parser("sweep", help="emit a parameter-grid CSV")
    ps.add_argument("app", choices=APPS)
    common(ps)

    pv = sub.add_parser("validate", help="run a property suite")
    pv.add_argument("suite", choices=SUITES)
    pv.add_argument("--fixture", choices=["default", "broken"], default="default")
    common(pv)

    pg = sub.add_parser("game-sim", help="simulate the XOR discrimination game")
    pg.add_argument("--ls", required=True, help="comma-separated distances in [0,1]")
    pg.add_argument("--trials", type=int, default=1_000_000)
    common(pg)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(
            command=args.command,
            input=getattr(args, "input", None),
            output=getattr(args, "output", None),
            tol=getattr(args, "tol", 1e-8),
            resolution=getattr(args, "resolution", 50),
            seed=getattr(args, "seed", 0),
            workers=getattr(args, "workers", None) or _default_workers(),
            format=getattr(args, "format", None),
        )
        if args.command == "witness":
            return cmd_witness(cfg, args.app)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.app)
        if args.command == "validate":
            return cmd_validate(cfg, args.suite, args.fixture)
        if args.command == "game-sim":
            return cmd_game_sim(cfg, args.ls, args.trials)
        parser.error(f"unknown command {args.command}")
    except _Unwritable as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_UNWRITABLE
    except UnsupportedInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (ValidationError, StarResError, json.JSONDecodeError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
