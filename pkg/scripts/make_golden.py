"""Regenerate the CLI golden fixtures under tests/fixtures/.

Each fixture directory holds the input files, ``argv.json`` (run from inside
the directory) and ``expected.json``, the Report without wall time.

    python3 scripts/make_golden.py
"""

from __future__ import annotations

import contextlib
import io
import json
import os
import shutil
import sys
from pathlib import Path

import numpy as np

from opalg import algebra as alg
from opalg import cli, cloner, gns
from opalg.fock import FockMode, phase_grid
from opalg.io import algebra_to_json, channel_to_json, functional_to_json, matrix_to_json, world_to_json, write_json
from opalg.linalg import random_unitary

ROOT = Path(__file__).resolve().parents[1] / "tests" / "fixtures"


def _functional(m) -> dict:
    return functional_to_json(alg.Functional.from_pairing(np.asarray(m, dtype=complex)))


def fixture_inputs() -> dict[str, tuple[list[str], dict[str, object]]]:
    """name -> (argv, {filename: json object})."""
    full2 = {"kind": "full", "dim": 2}
    faithful = _functional(np.eye(2) / 2)
    e1 = _functional(np.diag([1.0, 0.0]))
    e2 = _functional(np.diag([0.0, 1.0]))

    M2 = alg.full_matrix_algebra(2)
    rep = gns.gns_construct(M2, alg.vector_state([1, 0]))
    u = random_unitary(2, np.random.default_rng(7))
    rep_doc = cli._rep_to_json(rep)
    conj_doc = cli._rep_to_json(rep.conjugate(u))
    other_doc = cli._rep_to_json(gns.gns_construct(M2, alg.vector_state([0, 1])))

    blocks = alg.block_algebra([2, 3])
    hom = {"images": [matrix_to_json(b[:2, :2]) for b in blocks.basis]}

    mode = FockMode(6)
    cov = cloner.ancilla_channel(np.eye(6) / 6)
    grid = {"points": [list(map(float, x)) for x in phase_grid(3, 0.5)]}

    return {
        "state_check": (["state", "check", "--state", "s.json", "--algebra", "a.json"], {"s.json": faithful, "a.json": full2}),
        "state_decompose": (["state", "decompose", "--functional", "f.json"], {"f.json": _functional([[0, 1], [0, 0]])}),
        "state_born": (
            ["state", "born", "--world1", "w1.json", "--world2", "w2.json"],
            {"w1.json": world_to_json(alg.World.standard(4)), "w2.json": world_to_json(alg.World.fourier(4))},
        ),
        "gns_build_faithful": (["gns", "build", "--algebra", "a.json", "--state", "s.json", "--tol", "1e-9"], {"a.json": full2, "s.json": faithful}),
        "gns_build_vector": (["gns", "build", "--algebra", "a.json", "--state", "s.json"], {"a.json": full2, "s.json": e1}),
        "gns_equiv": (["gns", "equiv", "--rep1", "r1.json", "--rep2", "r2.json"], {"r1.json": rep_doc, "r2.json": conj_doc}),
        "gns_equiv_inequivalent": (["gns", "equiv", "--rep1", "r1.json", "--rep2", "r2.json"], {"r1.json": rep_doc, "r2.json": other_doc}),
        "gns_split": (["gns", "split", "--algebra", "a.json", "--hom", "h.json"], {"a.json": algebra_to_json(blocks), "h.json": hom}),
        "gns_universal": (
            ["gns", "universal", "--algebra", "a.json", "--states", "s.json"],
            {"a.json": full2, "s.json": {"states": [faithful, e1, e2]}},
        ),
        "fock_weyl_residual": (["fock", "weyl-residual", "--d", "40", "--x", "1,0", "--y", "0,1"], {}),
        "fock_coherent": (["fock", "coherent", "--alpha", "0.5,0", "--d", "12"], {}),
        "cloner_scan": (["cloner", "scan", "--d", "8", "--grid", "3x3", "--steps", "5"], {}),
        "cloner_covariance": (
            ["cloner", "covariance", "--channel", "ch.json", "--grid", "g.json"],
            {"ch.json": channel_to_json(cov), "g.json": grid},
        ),
        "dixmier_formula": (["dixmier", "estimate", "--formula", "1/k", "--horizon", "1e5", "--depth", "3"], {}),
        "dixmier_eigs": (["dixmier", "estimate", "--eigs", "e.json", "--horizon", "1e5"], {"e.json": {"values": [1.0, 1.0]}}),
        "selftest": (["selftest", "--seed", "3"], {}),
    }


def run_in(directory: Path, argv: list[str]) -> tuple[int, cli.Report | None]:
    cwd = os.getcwd()
    os.chdir(directory)
    try:
        with contextlib.redirect_stdout(io.StringIO()):
            return cli.dispatch(argv)
    finally:
        os.chdir(cwd)


def main() -> int:
    if ROOT.exists():
        shutil.rmtree(ROOT)
    for name, (argv, files) in fixture_inputs().items():
        d = ROOT / name
        d.mkdir(parents=True)
        for fname, obj in files.items():
            write_json(obj, d / fname)
        (d / "argv.json").write_text(json.dumps(argv) + "\n")
        code, rep = run_in(d, argv)
        if code != 0:
            print(f"{name}: exit {code}", file=sys.stderr)
            return 1
        (d / "expected.json").write_text(rep.to_json(wall_time=False))
        print(f"{name}: ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
