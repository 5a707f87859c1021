"""Command-line frontend: ``opalg <command> <action> [options]``.

Every run produces a :class:`Report` (command echo, config echo, results,
residuals, wall time) written as JSON to ``--output`` or stdout. Exit codes:
0 success, 1 unknown subcommand, 2 invalid input, 3 tolerance failure.
"""

from __future__ import annotations

import argparse
import csv
import io as _stdio
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import algebra as alg
from . import cloner as cl
from . import dixmier as dx
from . import fock as fk
from . import gns
from .errors import InequivalentRepresentations, NotAStateError, OpalgError, ToleranceError
from .io import (
    FormatError,
    algebra_from_json,
    algebra_to_json,
    channel_from_json,
    functional_from_json,
    functional_to_json,
    grid_from_json,
    matrix_from_json,
    matrix_to_json,
    read_json,
    world_from_json,
)
from .linalg import dag, numerical_rank, opnorm, random_density, vec_stack

COMMANDS = {
    "state": ("check", "decompose", "born"),
    "gns": ("build", "equiv", "split", "universal"),
    "fock": ("weyl-residual", "coherent"),
    "cloner": ("scan", "covariance"),
    "dixmier": ("estimate",),
    "selftest": (),
}


@dataclass(frozen=True)
class RunConfig:
    tol: float = 1e-9
    cutoff: int = 20
    seed: int = 0
    output_path: str | None = None
    format: str = "json"

    def __post_init__(self):
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise OpalgError("tol must be positive")
        if self.cutoff < 2:
            raise OpalgError("cutoff must be at least 2")
        if not 0 <= self.seed < 2**64:
            raise OpalgError("seed must be a 64-bit unsigned integer")
        if self.format not in ("json", "csv"):
            raise OpalgError("format must be json or csv")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


def _plain(obj):
    """numpy scalars to Python scalars for the JSON encoder."""
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


@dataclass
class Report:
    command: list[str]
    config: dict
    results: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def to_dict(self, wall_time: bool = True) -> dict:
        d = asdict(self)
        if not wall_time:
            d.pop("wall_time")
        return d

    def to_json(self, wall_time: bool = True) -> str:
        return json.dumps(self.to_dict(wall_time), indent=2, sort_keys=True, allow_nan=False, default=_plain) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Report":
        d = json.loads(text)
        return cls(d["command"], d["config"], d["results"], d["residuals"], d.get("wall_time", 0.0))


# -- JSON helpers -----------------------------------------------------------


def _vec(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex).reshape(-1)]


def _num(x):
    """Plain JSON number; non-finite values become null."""
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _cplx(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _load(path, loader, where: str):
    return loader(read_json(path), f"{path}:{where}")


def _point(text: str, name: str) -> np.ndarray:
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise OpalgError(f"--{name}: expected comma-separated numbers, got {text!r}") from None
    return np.array(vals)


def _positive_int(text: str) -> int:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if v < 1 or v != int(v):
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(v)


def _check(residuals: dict, bound: float, keys) -> None:
    bad = {k: residuals[k] for k in keys if residuals[k] is not None and residuals[k] > bound}
    if bad:
        raise ToleranceError(f"residuals above {bound:.1e}: {bad}")


# -- state ------------------------------------------------------------------


def _state_check(args, cfg: RunConfig, rep: Report) -> None:
    f = _load(args.state, functional_from_json, "$")
    A = _load(args.algebra, algebra_from_json, "$") if args.algebra else None
    try:
        s = alg.is_state(f, A, cfg.tol)
    except NotAStateError as exc:
        rep.results.update(is_state=False, failed_condition=exc.condition, violation=exc.amount)
        return
    rep.results["is_state"] = True
    rep.results["min_gram_eigenvalue"] = s.positivity_certificate
    rep.results["pure"] = alg.is_pure(s, cfg.tol) if s.algebra.is_full else None
    rep.results["bloch"] = [float(t) for t in alg.bloch_point(s)] if s.dim == 2 else None
    rep.residuals["negativity"] = max(0.0, -s.positivity_certificate)
    rep.residuals["normalization"] = _num(s.normalization_residual)


def _state_decompose(args, cfg: RunConfig, rep: Report) -> None:
    f = _load(args.functional, functional_from_json, "$")
    terms = alg.four_state_decomposition(f, min(cfg.tol, 1e-12))
    back = alg.reconstruct(terms, f.ambient_dim)
    rep.results["terms"] = [
        {"coefficient": _cplx(c), "state": functional_to_json(s.base)} for c, s in terms
    ]
    rep.residuals["reconstruction"] = float(np.max(np.abs(back.pairing - f.pairing), initial=0.0))
    _check(rep.residuals, max(1e-10, cfg.tol), ["reconstruction"])


def _state_born(args, cfg: RunConfig, rep: Report) -> None:
    w1 = world_from_json(read_json(args.world1), f"{args.world1}:$", cfg.tol)
    w2 = world_from_json(read_json(args.world2), f"{args.world2}:$", cfg.tol)
    m = alg.born_matrix(w1, w2)
    rep.results["born_matrix"] = m.tolist()
    rep.results["same_world"] = w1.same_as(w2, cfg.tol)
    rep.residuals["row_sums"] = float(np.max(np.abs(m.sum(axis=1) - 1)))
    rep.residuals["column_sums"] = float(np.max(np.abs(m.sum(axis=0) - 1)))
    _check(rep.residuals, max(1e-10, cfg.tol), ["row_sums", "column_sums"])


# -- gns --------------------------------------------------------------------


def _rep_to_json(r: gns.GnsRepresentation) -> dict:
    return {
        "algebra": algebra_to_json(r.source),
        "state": functional_to_json(r.state.base),
        "quotient_dim": r.quotient_dim,
        "gram": matrix_to_json(r.gram),
        "quotient_map": matrix_to_json(r.quotient_map),
        "rep_matrices": [matrix_to_json(m) for m in r.rep_matrices],
        "cyclic_vector": _vec(r.cyclic_vector),
    }


def _rep_from_json(obj, where: str) -> gns.GnsRepresentation:
    if isinstance(obj, dict) and "results" in obj:
        obj, where = obj["results"], f"{where}.results"
    if not isinstance(obj, dict):
        raise FormatError(where, "expected a representation object")
    for key in ("algebra", "state", "gram", "quotient_map", "rep_matrices", "cyclic_vector"):
        if key not in obj:
            raise FormatError(where, f"missing '{key}'")
    A = algebra_from_json(obj["algebra"], f"{where}.algebra")
    rho = alg.is_state(functional_from_json(obj["state"], f"{where}.state"), A)
    mats = np.array([
        matrix_from_json(m, f"{where}.rep_matrices[{i}]") for i, m in enumerate(obj["rep_matrices"])
    ])
    x = np.array([complex(*e) for e in obj["cyclic_vector"]])
    if mats.ndim != 3 or len(mats) != len(A) or mats.shape[1] != len(x):
        raise FormatError(f"{where}.rep_matrices", "shape does not match algebra and cyclic vector")
    return gns.GnsRepresentation(
        A, rho, len(x), matrix_from_json(obj["gram"], f"{where}.gram"),
        matrix_from_json(obj["quotient_map"], f"{where}.quotient_map"), mats, x,
    )


def _gns_build(args, cfg: RunConfig, rep: Report) -> None:
    A = _load(args.algebra, algebra_from_json, "$")
    rho = alg.is_state(_load(args.state, functional_from_json, "$"), A, cfg.tol)
    r = gns.gns_construct(A, rho, cfg.tol)
    rep.results.update(_rep_to_json(r))
    prod, adj = r.homomorphism_residuals()
    rep.residuals["reconstruction"] = gns.verify_reconstruction(r, A.basis, cfg.tol)
    rep.residuals["product"] = prod
    rep.residuals["adjoint"] = adj
    rep.residuals["cyclic_rank_gap"] = r.quotient_dim - r.cyclic_rank(cfg.tol)


def _gns_equiv(args, cfg: RunConfig, rep: Report) -> None:
    r1 = _rep_from_json(read_json(args.rep1), str(args.rep1))
    r2 = _rep_from_json(read_json(args.rep2), str(args.rep2))
    try:
        w = gns.intertwiner(r1, r2, cfg.tol)
    except InequivalentRepresentations as exc:
        rep.results.update(equivalent=False, witness=exc.witness, state_gap=exc.gap)
        return
    rep.results.update(equivalent=True, unitary=matrix_to_json(w.unitary))
    rep.residuals.update(
        unitarity=w.unitarity_residual, intertwining=w.intertwining_residual, cyclic=w.cyclic_residual
    )
    _check(rep.residuals, max(1e-6, 1e3 * cfg.tol), ["unitarity", "intertwining", "cyclic"])


def _gns_split(args, cfg: RunConfig, rep: Report) -> None:
    A = _load(args.algebra, algebra_from_json, "$")
    obj = read_json(args.hom)
    imgs = obj.get("images") if isinstance(obj, dict) else None
    if not isinstance(imgs, list):
        raise FormatError(f"{args.hom}:$", "missing 'images'")
    mats = np.array([matrix_from_json(m, f"{args.hom}:$.images[{i}]") for i, m in enumerate(imgs)])
    split = gns.kernel_central_projection(A, mats, cfg.tol)
    rep.results["E"] = matrix_to_json(split.E)
    rep.results["ae_dim"] = len(split.ae_basis)
    rep.results["injectivity_gap"] = split.injectivity_gap(cfg.tol)
    rep.residuals["phi"] = split.phi_residual()
    rep.residuals.update(split.projection_residuals())
    _check(rep.residuals, max(1e-6, 1e3 * cfg.tol), ["phi"])


def _gns_universal(args, cfg: RunConfig, rep: Report) -> None:
    A = _load(args.algebra, algebra_from_json, "$")
    obj = read_json(args.states)
    items = obj.get("states") if isinstance(obj, dict) else obj
    if not isinstance(items, list) or not items:
        raise FormatError(f"{args.states}:$", "expected a nonempty 'states' list")
    states = [
        alg.is_state(functional_from_json(s, f"{args.states}:$.states[{i}]"), A, cfg.tol)
        for i, s in enumerate(items)
    ]
    u = gns.universal_representation(A, states, cfg.tol)
    rep.results["dim"] = u.dim
    rep.results["block_dims"] = [b.quotient_dim for b in u.blocks]
    rep.results["faithful"] = bool(
        numerical_rank(vec_stack(u.rep_matrices), cfg.tol) == len(A)
    )
    res = [b.homomorphism_residuals() for b in u.blocks]
    rep.residuals["product"] = max(p for p, _ in res)
    rep.residuals["adjoint"] = max(a for _, a in res)


# -- fock -------------------------------------------------------------------


def _fock_mode(args, cfg: RunConfig, modes: int) -> fk.FockMode:
    return fk.FockMode(args.d if args.d is not None else cfg.cutoff, modes)


def _fock_weyl(args, cfg: RunConfig, rep: Report) -> None:
    x, y = _point(args.x, "x"), _point(args.y, "y")
    if len(x) != len(y) or len(x) % 2:
        raise OpalgError("--x and --y need the same even number of coordinates")
    mode = _fock_mode(args, cfg, len(x) // 2)
    rep.results["cutoff"] = mode.cutoff
    rep.results["beta"] = fk.SymplecticForm.standard(mode.modes)(x, y)
    rep.residuals["relation"] = fk.weyl_relation_residual(x, y, mode)
    rep.residuals["exchange"] = fk.weyl_exchange_residual(x, y, mode)
    eye = np.eye(mode.dim)
    rep.residuals["unitarity"] = max(
        opnorm(dag(w) @ w - eye) for w in (fk.weyl(x, mode), fk.weyl(y, mode))
    )
    _check(rep.residuals, max(1e-10, cfg.tol), ["unitarity"])


def _fock_coherent(args, cfg: RunConfig, rep: Report) -> None:
    alpha = _point(args.alpha, "alpha")
    if len(alpha) != 2:
        raise OpalgError("--alpha needs two coordinates q,p")
    mode = _fock_mode(args, cfg, 1)
    v = fk.coherent(alpha, mode)
    n = np.arange(mode.cutoff)
    mean = float(alpha @ alpha) / 2
    poisson = np.exp(-mean + n * math.log(mean) - np.array([math.lgamma(k + 1) for k in n])) if mean > 0 else (n == 0) * 1.0
    rep.results["cutoff"] = mode.cutoff
    rep.results["vector"] = _vec(v)
    rep.results["vacuum_overlap"] = float(abs(v[0]) ** 2)
    rep.residuals["norm"] = abs(float(np.linalg.norm(v)) - 1)
    rep.residuals["poisson"] = float(np.max(np.abs(np.abs(v[mode.shielded]) ** 2 - poisson[mode.shielded])))


# -- cloner -----------------------------------------------------------------


def _grid_spec(text: str) -> tuple[int, int]:
    try:
        a, b = (int(t) for t in text.lower().split("x"))
    except ValueError:
        raise OpalgError(f"--grid: expected AxB, got {text!r}") from None
    if a < 1 or b < 1:
        raise OpalgError("--grid: sizes must be positive")
    return a, b


def _cloner_scan(args, cfg: RunConfig, rep: Report) -> None:
    nq, np_ = _grid_spec(args.grid)
    mode = _fock_mode(args, cfg, 1)
    qs = (np.arange(nq) - (nq - 1) / 2) * args.spacing
    ps = (np.arange(np_) - (np_ - 1) / 2) * args.spacing
    grid = [np.array([q, p]) for q in qs for p in ps]
    if args.steps < 2:
        raise OpalgError("--steps must be at least 2")
    dec = cl.ClonerDecomposition({cl.NORMAL: 1.0}, cl.symmetric_splitter_cloner(mode))
    scan = cl.decomposed_fidelity_scan(dec, grid, mode, args.steps, cfg.tol)
    rep.results["table"] = [{"c12": c, "fidelity": f} for c, f in scan.rows]
    rep.results["normal_fidelity"] = scan.normal_fidelity
    rep.results["argmax_c12"] = scan.argmax
    rep.results["flatness"] = scan.flatness
    rep.residuals["affine_deviation"] = scan.affine_deviation
    _check(rep.residuals, 1e-7, ["affine_deviation"])


def _cloner_covariance(args, cfg: RunConfig, rep: Report) -> None:
    ch = _load(args.channel, channel_from_json, "$")
    grid = _load(args.grid, grid_from_json, "$")
    if ch.out_dim != ch.in_dim**2:
        raise OpalgError("a 1 -> 2 cloner must map dimension d to d^2")
    mode = fk.FockMode(ch.in_dim)
    tests = cl.coherent_test_states(mode, [np.zeros(2), np.array([args.probe, 0.0])])
    rep.results["in_dim"] = ch.in_dim
    rep.results["trace_preserving"] = ch.is_trace_preserving
    rep.results["grid_points"] = len(grid)
    rep.residuals["covariance"] = cl.covariance_residual(ch, grid, tests, mode)


# -- dixmier ----------------------------------------------------------------


def _eigs_from_json(obj, where: str, tail: str | None, n_max: int | None) -> dx.EigenSequence:
    if isinstance(obj, dict) and ("dim" in obj or "rows" in obj):
        return dx.eigen_sequence_from_matrix(matrix_from_json(obj, where), tail, n_max)
    vals = obj.get("values") if isinstance(obj, dict) else obj
    if isinstance(obj, dict):
        tail = obj.get("tail", tail)
    if not isinstance(vals, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals
    ):
        raise FormatError(f"{where}.values", "expected a list of numbers")
    return dx.EigenSequence.from_values(vals, n_max, tail)


def _dixmier_estimate(args, cfg: RunConfig, rep: Report) -> None:
    if (args.formula is None) == (args.eigs is None):
        raise OpalgError("give exactly one of --formula or --eigs")
    if args.formula is not None:
        seq = dx.EigenSequence.from_formula(args.formula, args.horizon or 10**6)
    else:
        seq = _eigs_from_json(read_json(args.eigs), f"{args.eigs}:$", args.tail, args.horizon)
    horizon = min(args.horizon or seq.n_max, seq.n_max)
    w = dx.singularity_witness(seq, horizon, args.depth)
    bounded, sup = dx.is_dixmier_bounded(seq, horizon)
    rep.results.update(
        estimate=w.estimate,
        spread=w.spread,
        sup_estimate=sup,
        horizon=w.horizon,
        depth=args.depth,
        flags={"bounded": bounded, "trace_class": w.trace_class, "head_insensitive": w.head_insensitive},
    )
    rep.residuals["head_shifts"] = {str(k): v for k, v in w.head_shifts.items()}
    rep.residuals["sigma_head_shifts"] = {str(k): v for k, v in w.sigma_head_shifts.items()}
    rep.residuals["dilation_shift"] = _num(w.dilation_shift)


# -- selftest ---------------------------------------------------------------


def run_selftest(cfg: RunConfig) -> dict[str, dict]:
    """Small instances of the library invariants; each entry has value, bound, passed."""
    rng = cfg.rng()
    out = {}

    def record(name, value, bound):
        out[name] = {"value": float(value), "bound": bound, "passed": bool(value <= bound)}

    M2 = alg.full_matrix_algebra(2)
    faithful = gns.gns_construct(M2, alg.density_state(np.eye(2) / 2), cfg.tol)
    vector = gns.gns_construct(M2, alg.vector_state([1, 0]), cfg.tol)
    record("gns_dimensions", abs(faithful.quotient_dim - 4) + abs(vector.quotient_dim - 2), 0)

    worst = 0.0
    for n in (2, 3, 4):
        A = alg.full_matrix_algebra(n)
        r = gns.gns_construct(A, alg.density_state(random_density(n, rng)), cfg.tol)
        worst = max(worst, gns.verify_reconstruction(r, [A.random_element(rng) for _ in range(3)]))
    record("gns_reconstruction", worst, 1e-10)

    worst = 0.0
    for n in (2, 4):
        f = alg.Functional.from_pairing(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
        back = alg.reconstruct(alg.four_state_decomposition(f), n)
        worst = max(worst, float(np.max(np.abs(back.pairing - f.pairing))))
    record("four_state_reconstruction", worst, 1e-10)

    mode = fk.FockMode(10)
    w = fk.weyl([0.7, -0.3], mode)
    record("weyl_unitarity", opnorm(dag(w) @ w - np.eye(mode.dim)), 1e-10)

    record("fidelity_half", abs(cl.fidelity(np.diag([1.0, 0.0]), np.eye(2) / 2) - 0.5), 1e-10)

    ch = cl.random_channel(3, 4, 3, rng)
    rho, O = random_density(3, rng), rng.normal(size=(4, 4))
    lhs = np.trace(rho @ cl.apply_heisenberg(ch, O))
    rhs = np.trace(cl.apply_schrodinger(ch, rho) @ O)
    record("channel_duality", abs(lhs - rhs), 1e-10)

    m = alg.born_matrix(alg.World.standard(4), alg.World.fourier(4))
    record("born_uniform", float(np.max(np.abs(m - 0.25))), 1e-10)

    est = dx.generalized_limit(dx.log_mean_series(dx.EigenSequence.from_formula("1/k", 10**5))).estimate
    record("dixmier_harmonic", abs(est - 1.0), 0.05)
    return out


def _selftest(args, cfg: RunConfig, rep: Report) -> None:
    checks = run_selftest(cfg)
    rep.results["checks"] = checks
    rep.residuals.update({k: v["value"] for k, v in checks.items()})
    failed = [k for k, v in checks.items() if not v["passed"]]
    rep.results["passed"] = not failed
    if failed:
        raise ToleranceError(f"selftest failed: {', '.join(failed)}")


# -- argument parsing -------------------------------------------------------


class _UsageError(Exception):
    def __init__(self, message: str, unknown: bool):
        self.unknown = unknown
        super().__init__(message)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}", "invalid choice" in message)


HANDLERS = {
    ("state", "check"): _state_check,
    ("state", "decompose"): _state_decompose,
    ("state", "born"): _state_born,
    ("gns", "build"): _gns_build,
    ("gns", "equiv"): _gns_equiv,
    ("gns", "split"): _gns_split,
    ("gns", "universal"): _gns_universal,
    ("fock", "weyl-residual"): _fock_weyl,
    ("fock", "coherent"): _fock_coherent,
    ("cloner", "scan"): _cloner_scan,
    ("cloner", "covariance"): _cloner_covariance,
    ("dixmier", "estimate"): _dixmier_estimate,
    ("selftest", None): _selftest,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=RunConfig.tol)
    common.add_argument("--cutoff", type=int, default=RunConfig.cutoff)
    common.add_argument("--seed", type=int, default=RunConfig.seed)
    common.add_argument("--output", "-o", dest="output_path", default=None)
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = _Parser(prog="opalg", description="Operator-algebra state numerics.")
    top = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def group(name):
        p = top.add_parser(name)
        return p.add_subparsers(dest="action", required=True, parser_class=_Parser)

    st = group("state")
    p = st.add_parser("check", parents=[common])
    p.add_argument("--state", required=True)
    p.add_argument("--algebra")
    p = st.add_parser("decompose", parents=[common])
    p.add_argument("--functional", required=True)
    p = st.add_parser("born", parents=[common])
    p.add_argument("--world1", required=True)
    p.add_argument("--world2", required=True)

    g = group("gns")
    p = g.add_parser("build", parents=[common])
    p.add_argument("--algebra", required=True)
    p.add_argument("--state", required=True)
    p = g.add_parser("equiv", parents=[common])
    p.add_argument("--rep1", required=True)
    p.add_argument("--rep2", required=True)
    p = g.add_parser("split", parents=[common])
    p.add_argument("--algebra", required=True)
    p.add_argument("--hom", required=True)
    p = g.add_parser("universal", parents=[common])
    p.add_argument("--algebra", required=True)
    p.add_argument("--states", required=True)

    f = group("fock")
    p = f.add_parser("weyl-residual", parents=[common])
    p.add_argument("--d", type=int)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p = f.add_parser("coherent", parents=[common])
    p.add_argument("--d", type=int)
    p.add_argument("--alpha", required=True)

    c = group("cloner")
    p = c.add_parser("scan", parents=[common])
    p.add_argument("--d", type=int)
    p.add_argument("--grid", default="5x5")
    p.add_argument("--steps", type=int, default=11)
    p.add_argument("--spacing", type=float, default=0.5)
    p = c.add_parser("covariance", parents=[common])
    p.add_argument("--channel", required=True)
    p.add_argument("--grid", required=True)
    p.add_argument("--probe", type=float, default=0.5, help="q of the displaced test state")

    d = group("dixmier")
    p = d.add_parser("estimate", parents=[common])
    p.add_argument("--formula")
    p.add_argument("--eigs")
    p.add_argument("--tail", help="formula continuing an explicit eigenvalue list")
    p.add_argument("--horizon", type=_positive_int)
    p.add_argument("--depth", type=int, default=3)

    top.add_parser("selftest", parents=[common])
    return parser


def _scan_csv(rep: Report) -> str:
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["c12", "fidelity"])
    for row in rep.results["table"]:
        w.writerow([repr(row["c12"]), repr(row["fidelity"])])
    return buf.getvalue()


def _emit(rep: Report, cfg: RunConfig, text: str | None = None) -> None:
    text = rep.to_json() if text is None else text
    if cfg.output_path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(cfg.output_path).write_text(text)


def dispatch(argv: list[str]) -> tuple[int, Report | None]:
    """Run one command; returns (exit code, report or None on usage errors)."""
    parser = build_parser()
    argv = list(argv)
    if argv[:1] in (["-h"], ["--help"]):
        sys.stdout.write(parser.format_help())
        return 0, None
    if not argv or argv[0] not in COMMANDS:
        sys.stderr.write(parser.format_usage())
        if argv:
            sys.stderr.write(f"opalg: unknown subcommand {argv[0]!r}\n")
        return 1, None
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        sys.stderr.write(parser.format_usage() + str(exc) + "\n")
        return (1 if exc.unknown else 2), None
    start = time.perf_counter()
    try:
        cfg = RunConfig(args.tol, args.cutoff, args.seed, args.output_path, args.format)
    except OpalgError as exc:
        sys.stderr.write(f"opalg: {exc}\n")
        return 2, None
    rep = Report(argv, asdict(cfg))
    handler = HANDLERS[(args.command, getattr(args, "action", None))]
    code = 0
    try:
        handler(args, cfg, rep)
    except (OpalgError, OSError) as exc:
        sys.stderr.write(f"opalg: error: {exc}\n")
        rep.results["error"] = str(exc)
        code = 2
    except ToleranceError as exc:
        sys.stderr.write(f"opalg: tolerance failure: {exc}\n")
        rep.results["error"] = str(exc)
        code = 3
    rep.wall_time = time.perf_counter() - start
    if code == 0 and cfg.format == "csv":
        if (args.command, getattr(args, "action", None)) != ("cloner", "scan"):
            sys.stderr.write("opalg: --format csv is only available for cloner scan\n")
            return 2, rep
        _emit(rep, cfg, _scan_csv(rep))
    elif code != 2:
        _emit(rep, cfg)
    return code, rep


def main(argv: list[str] | None = None) -> int:
    code, _ = dispatch(sys.argv[1:] if argv is None else argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
