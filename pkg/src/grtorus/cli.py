"""Command-line front end.

Exit codes: 0 success, 1 a verification failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import jsonschema

from . import chambers as ch
from . import lattice as lat
from . import moment as mm
from . import pipeline as pl
from .homology import IntegerMatrix
from .polytope import PolytopeError

EXIT_OK, EXIT_FAILED, EXIT_BAD_INPUT = 0, 1, 2


@dataclass(frozen=True)
class Config:
    command: str
    fmt: str = "human"  # human | json
    out: Path | None = None
    dot: Path | None = None
    seed: int = 0
    samples: int = 10_000
    tol: float = 1e-9

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if self.samples < 1:
            raise ValueError("sample count must be at least 1")


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _emit(cfg: Config, text: str) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        cfg.out.write_text(text)


def _corrupted_boundary() -> IntegerMatrix:
    rows = [list(r) for r in pl.boundary_matrix().entries]
    rows[0][0] = 2
    return IntegerMatrix.from_rows(rows, 5)


def run_homology(cfg: Config, corrupt_boundary: bool = False) -> int:
    try:
        report = pl.run_pipeline(samples=8, seed=cfg.seed,
                                 boundary=_corrupted_boundary() if corrupt_boundary else None)
    except pl.PipelineError as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return EXIT_FAILED
    if cfg.fmt == "json":
        _emit(cfg, report.dumps() + "\n")
    else:
        lines = [f"H_*(Gr(2,C^5)/T): {report.table}",
                 f"H_*(V5, V0): {report.relative}",
                 f"H_*(V0): {report.v0.table}  (boundary sphere {report.v0.boundary_sphere}, "
                 f"{report.v0.cells} cells)",
                 f"SNF invariants of the degree matrix: {report.snf_invariants}",
                 "chambers per level: " + ", ".join(
                     f"{k}:{n}" for k, n in sorted(report.filtration.counts().items())),
                 f"certified chambers: {len(report.certificate.chambers)}, "
                 f"intersection pairs checked: {report.certificate.positive_intersection_pairs}",
                 f"Euler characteristics: {report.euler}"]
        _emit(cfg, "\n".join(lines) + "\n")
    if not report.ok:
        print(f"verification failed: expected {pl.EXPECTED_ORBIT_HOMOLOGY}, got {report.table}; "
              f"degree rule {'holds' if report.degree_rule else 'violated'}; "
              f"Euler check {report.euler}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def _census(d: ch.Decomposition, with_level: bool) -> dict:
    out = {"chambers": len(d),
           "central_chamber": d.central is not None,
           "missed_walls": [str(l) for l in d.missed_walls],
           "records": ch.chamber_records(d, with_level=with_level)}
    lemma = ch.check_positive_intersection(d)
    out["positive_intersection"] = {"passed": lemma.passed, "checked_pairs": lemma.checked_pairs,
                                    "failures": [str(f) for f in lemma.failures]}
    return out


def run_chambers(cfg: Config, petersen: Path | None = None, export: Path | None = None) -> int:
    d = ch.dp5_decomposition()
    census = _census(d, with_level=True)
    census["levels"] = {str(k): len(v) for k, v in ch.levels(d).items()}
    if cfg.dot is not None:
        cfg.dot.write_text(ch.adjacency_dot(d))
    if petersen is not None:
        petersen.write_text(lat.petersen_dot())
    if export is not None:
        export.write_text(_dumps(ch.arrangement_to_json(d.arrangement)))
    if cfg.fmt == "json":
        _emit(cfg, _dumps(census))
    else:
        levels = ", ".join(f"level {k}: {n}" for k, n in census["levels"].items())
        _emit(cfg, f"{census['chambers']} chambers ({levels})\n")
    ok = census["positive_intersection"]["passed"] and census["chambers"] == 76
    return EXIT_OK if ok else EXIT_FAILED


def run_arrangement(cfg: Config, path: Path) -> int:
    try:
        data = json.loads(path.read_text())
        a = ch.arrangement_from_json(data)
    except OSError as e:
        print(f"cannot read {path}: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except json.JSONDecodeError as e:
        print(f"{path} is not JSON: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except jsonschema.ValidationError as e:
        print(f"schema violation at {list(e.absolute_path)}: {e.message}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (PolytopeError, ch.ArrangementError) as e:
        print(f"invalid arrangement: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT
    d = ch.enumerate_chambers(a)
    census = _census(d, with_level=False)
    ok = census["positive_intersection"]["passed"]
    if d.central is not None:
        try:
            cert = pl.contractibility_certificate(d, samples=8, seed=cfg.seed)
            census["retraction"] = {"passed": True, "points_checked":
                                    sum(c.points_checked for c in cert.chambers)}
        except pl.CertificateError as e:
            census["retraction"] = {"passed": False, "error": str(e)}
            ok = False
    if cfg.dot is not None:
        cfg.dot.write_text(ch.adjacency_dot(d))
    if cfg.fmt == "json":
        _emit(cfg, _dumps(census))
    else:
        _emit(cfg, f"{census['chambers']} chambers; central chamber: "
                   f"{'yes' if census['central_chamber'] else 'no'}; positive intersection "
                   f"{'holds' if census['positive_intersection']['passed'] else 'FAILS'}\n")
    return EXIT_OK if ok else EXIT_FAILED


def run_moment(cfg: Config) -> int:
    result = mm.check_moment_map(cfg.samples, cfg.seed)
    passed = result.passes(cfg.tol)
    if cfg.fmt == "json":
        _emit(cfg, _dumps(result.to_json() | {"tol": cfg.tol, "passed": passed}))
    else:
        _emit(cfg, f"{result.samples} samples: invariance {result.max_invariance_residual:.3e}, "
                   f"Plucker {result.max_plucker_residual:.3e}, "
                   f"containment failures {result.containment_failures}\n")
    return EXIT_OK if passed else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--out", type=Path, help="write output here instead of stdout")
    common.add_argument("--dot", type=Path, help="write the chamber adjacency graph as DOT")
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="grtorus",
                                description="Homology of the torus quotient of Gr(2, C^5).")
    sub = p.add_subparsers(dest="command", required=True)

    h = sub.add_parser("homology", parents=[common], help="compute and verify the homology table")
    h.add_argument("--corrupt-boundary", action="store_true", help=argparse.SUPPRESS)

    c = sub.add_parser("chambers", parents=[common], help="chamber census of the dP5 arrangement")
    c.add_argument("--petersen", type=Path, help="write the curve intersection graph as DOT")
    c.add_argument("--export", type=Path, help="write the arrangement as JSON")

    a = sub.add_parser("arrangement", parents=[common], help="analyse a directed arrangement file")
    a.add_argument("--input", type=Path, required=True)

    m = sub.add_parser("moment", parents=[common], help="sampling checks of the moment map")
    m.add_argument("--samples", type=int, default=10_000)
    m.add_argument("--tol", type=float, default=1e-9)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_BAD_INPUT if e.code else EXIT_OK
    try:
        cfg = Config(args.command, "json" if args.json else "human", args.out, args.dot,
                     args.seed, getattr(args, "samples", 10_000), getattr(args, "tol", 1e-9))
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT
    if args.command == "homology":
        return run_homology(cfg, args.corrupt_boundary)
    if args.command == "chambers":
        return run_chambers(cfg, args.petersen, args.export)
    if args.command == "arrangement":
        return run_arrangement(cfg, args.input)
    return run_moment(cfg)
