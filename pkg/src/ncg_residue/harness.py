"""
Command-line front end: verification suites, density evaluation, coefficient
tables and numeric oracles.

Exit codes: 0 when no record is a mismatch, 1 on any mismatch, 2 on usage or
input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .clifford import AntisymTensor3, build_rep
from .errors import ResidueError, ValidityError
from .operators import KINDS, JetData, PerturbationSpec
from .quadrature import cubature_sphere_integral, mc_sphere_oracle
from .residue import (ALIASES, QUADRATURE_TOL, SYMBOLIC_TOL, THEOREMS, VerificationRecord, boundary_coefficient_1,
                      boundary_coefficient_2, boundary_density, boundary_numeric_oracle, check_validity, classify,
                      compare, density_by_assembly, density_by_composition, expand_theorem_ids, inverse_power,
                      left_operator, split_jets, tangential_coefficient)
from .symbols import compose

log = logging.getLogger("ncg_residue")

ALLOWED_DIMS = (2, 4, 6, 8)
DEFAULT_DIMS = (2, 4, 6)
FORMATS = ("json", "csv", "md")


class UsageError(Exception):
    """Bad command-line configuration (exit code 2)."""


class SchemaError(UsageError):
    def __init__(self, fields: list[str]):
        super().__init__("jets file violates the schema: " + "; ".join(fields))
        self.fields = fields


# ---------------------------------------------------------------------------
# configuration

@dataclass
class SuiteConfig:
    dims: list[int] = field(default_factory=lambda: list(DEFAULT_DIMS))
    theorems: list[str] = field(default_factory=lambda: list(THEOREMS))
    seeds: list[int] = field(default_factory=lambda: list(range(5)))
    tolerance: float = SYMBOLIC_TOL
    fmt: str = "json"

    def validate(self):
        bad = [d for d in self.dims if d not in ALLOWED_DIMS]
        if bad:
            raise UsageError(f"dimensions must be in {ALLOWED_DIMS}, got {bad}")
        try:
            self.theorems = expand_theorem_ids(self.theorems)
        except KeyError as exc:
            known = sorted(list(THEOREMS) + list(ALIASES))
            raise UsageError(f"unknown theorem id {exc.args[0]!r}; known ids: {', '.join(known)}") from None
        for s in self.seeds:
            if not 0 <= s < 2 ** 64:
                raise UsageError(f"seeds must be 64-bit unsigned integers, got {s}")
        if not self.tolerance > 0:
            raise UsageError("tolerance must be positive")
        if self.fmt not in FORMATS:
            raise UsageError(f"format must be one of {FORMATS}")
        return self


def thread_cap() -> int:
    raw = os.environ.get("NCG_RESIDUE_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        val = int(raw)
    except ValueError:
        raise UsageError(f"NCG_RESIDUE_THREADS must be a positive integer, got {raw!r}") from None
    if val < 1:
        raise UsageError(f"NCG_RESIDUE_THREADS must be a positive integer, got {raw!r}")
    return val


# ---------------------------------------------------------------------------
# suite execution

def run_suite(config: SuiteConfig) -> tuple[list[VerificationRecord], list[str]]:
    """Records for the Cartesian product, plus notes for skipped combinations."""
    config.validate()
    jobs, skipped = [], []
    for theorem in config.theorems:
        for n in config.dims:
            try:
                check_validity(theorem, n)
            except ValidityError as exc:
                skipped.append(f"{theorem} n={n}: skipped ({exc})")
                continue
            for seed in config.seeds:
                jobs.append((theorem, n, seed))

    def one(job):
        theorem, n, seed = job
        jets = JetData.random(n, seed, THEOREMS[theorem].kind)
        return compare(theorem, jets, config.tolerance, seed)

    with ThreadPoolExecutor(max_workers=thread_cap()) as pool:
        records = list(pool.map(one, jobs))
    records.sort(key=VerificationRecord.sort_key)
    return records, skipped


def exit_code(records) -> int:
    return 1 if any(r.status == "mismatch" for r in records) else 0


# ---------------------------------------------------------------------------
# reports

def emit_report(records, fmt: str = "json", skipped=()) -> bytes:
    """Deterministic report bytes, records sorted by (theorem, n, seed)."""
    records = sorted(records, key=VerificationRecord.sort_key)
    if fmt == "json":
        doc = {"records": [r.to_dict() for r in records], "skipped": list(skipped)}
        return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theorem", "n", "seed", "lhs_re", "lhs_im", "rhs_re", "rhs_im",
                    "abs_err", "rel_err", "status", "notes"])
        for r in records:
            w.writerow([r.theorem, r.n, "" if r.seed is None else r.seed, repr(r.lhs.real), repr(r.lhs.imag),
                        repr(r.rhs.real), repr(r.rhs.imag), repr(r.abs_err), repr(r.rel_err), r.status, r.notes])
        return buf.getvalue().encode()
    if fmt == "md":
        lines = ["| theorem | n | seed | lhs | rhs | abs_err | rel_err | status | notes |",
                 "|---|---|---|---|---|---|---|---|---|"]
        for r in records:
            lines.append(f"| {r.theorem} | {r.n} | {'' if r.seed is None else r.seed} | {_cfmt(r.lhs)} | "
                         f"{_cfmt(r.rhs)} | {r.abs_err:.3e} | {r.rel_err:.3e} | {r.status} | {r.notes} |")
        for s in skipped:
            lines.append(f"\n{s}")
        return ("\n".join(lines) + "\n").encode()
    raise UsageError(f"format must be one of {FORMATS}")


def parse_report(data: bytes) -> list[VerificationRecord]:
    """Inverse of the JSON report."""
    doc = json.loads(data)
    return [VerificationRecord.from_dict(d) for d in doc["records"]]


def _cfmt(z: complex) -> str:
    return f"{z.real:.10g}{z.imag:+.10g}j"


# ---------------------------------------------------------------------------
# jets files

def _array(doc, name, shape, problems, warn=True):
    if name not in doc:
        if warn:
            log.warning("field %r missing; defaulting to zero", name)
        return np.zeros(shape)
    try:
        arr = np.array(doc[name], dtype=float)
    except (TypeError, ValueError):
        problems.append(f"{name}: not a numeric array")
        return np.zeros(shape)
    if arr.shape != shape:
        problems.append(f"{name}: shape {arr.shape}, expected {shape}")
        return np.zeros(shape)
    return arr


def jets_from_dict(doc) -> tuple[JetData, bool]:
    """Parse the jets schema; returns the data and whether ``c(u)``, ``c(v)`` sandwich it.

    The sandwich is used when ``u`` or ``v`` is given.
    """
    if not isinstance(doc, dict):
        raise SchemaError(["<root>: expected an object"])
    problems = []
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 2 or n % 2 or n > 12:
        raise SchemaError([f"n: expected an even integer in [2, 12], got {n!r}"])
    known = {"n", "f1", "f2", "u", "v", "dv", "du", "perturbation"}
    problems += [f"{k}: unknown field" for k in sorted(set(doc) - known)]
    f1 = _array(doc, "f1", (n,), problems)
    f2 = _array(doc, "f2", (n, n), problems)
    if f2.shape == (n, n) and not np.allclose(f2, f2.T, atol=1e-12):
        problems.append("f2: not symmetric")
    u = _array(doc, "u", (n,), problems)
    v = _array(doc, "v", (n,), problems)
    dv = _array(doc, "dv", (n, n), problems)
    du = _array(doc, "du", (n, n), problems, warn=False) if "du" in doc else None
    pdoc = doc.get("perturbation", {"kind": "none"})
    pert = PerturbationSpec()
    if not isinstance(pdoc, dict):
        problems.append("perturbation: expected an object")
    else:
        kind = pdoc.get("kind", "none")
        if kind not in KINDS:
            problems.append(f"perturbation.kind: {kind!r} not in {KINDS}")
        else:
            needs = {"vector_grading": ("X",), "torsion_grading": ("T",), "torsion_vector": ("T", "Y")}[kind] \
                if kind in ("vector_grading", "torsion_grading", "torsion_vector") else ()
            X = Y = T = None
            if "X" in needs or "X" in pdoc:
                X = _array(pdoc, "X", (n,), problems, warn="X" in needs)
            if "Y" in needs or "Y" in pdoc:
                Y = _array(pdoc, "Y", (n,), problems, warn="Y" in needs)
            if "T" in needs or "T" in pdoc:
                T = _tensor(pdoc.get("T"), n, problems)
            if not problems:
                pert = PerturbationSpec(kind, X=X if kind == "vector_grading" else None,
                                        T=T if kind in ("torsion_grading", "torsion_vector") else None,
                                        Y=Y if kind == "torsion_vector" else None)
    if problems:
        raise SchemaError(problems)
    sandwich = "u" in doc or "v" in doc
    return JetData(n, f1, f2, u, v, dv, pert, du), sandwich


def _tensor(entries, n, problems) -> AntisymTensor3:
    if entries is None:
        log.warning("field 'T' missing; defaulting to zero")
        return AntisymTensor3(n, {})
    comps = {}
    if not isinstance(entries, list):
        problems.append("perturbation.T: expected a list of {i, j, k, value}")
        return AntisymTensor3(n, {})
    for idx, e in enumerate(entries):
        try:
            i, j, k, val = int(e["i"]), int(e["j"]), int(e["k"]), float(e["value"])
        except (KeyError, TypeError, ValueError):
            problems.append(f"perturbation.T[{idx}]: expected integer i, j, k and numeric value")
            continue
        if not all(0 <= a < n for a in (i, j, k)) or len({i, j, k}) < 3:
            problems.append(f"perturbation.T[{idx}]: indices must be distinct and in [0, {n})")
            continue
        # fold any ordering onto i < j < k with the permutation sign
        perm = [i, j, k]
        sign = 1
        for a in range(3):
            for b in range(2 - a):
                if perm[b] > perm[b + 1]:
                    perm[b], perm[b + 1] = perm[b + 1], perm[b]
                    sign = -sign
        key = tuple(perm)
        comps[key] = comps.get(key, 0.0) + sign * val
    return AntisymTensor3(n, comps)


def load_jets(path: str) -> tuple[JetData, bool]:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read jets file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError([f"<root>: invalid JSON ({exc})"]) from None
    return jets_from_dict(doc)


# ---------------------------------------------------------------------------
# density / table / oracle

def density_report(jets: JetData, sandwich: bool) -> dict:
    """Interior density by both routes and both boundary cases."""
    rep = build_rep(jets.n)
    a = density_by_composition(rep, jets, sandwich)
    b = density_by_assembly(rep, jets, sandwich)
    out = {"n": jets.n, "perturbation": jets.perturbation.kind, "sandwich": sandwich,
           "interior_composition": [a.real, a.imag], "interior_assembly": [b.real, b.imag]}
    c1 = boundary_density(rep, jets, 1, sandwich)
    out["boundary_case1"] = [c1.real, c1.imag]
    if jets.n >= 4:
        c2 = boundary_density(rep, jets, 2, sandwich)
        out["boundary_case2"] = [c2.real, c2.imag]
    else:
        out["boundary_case2"] = None
        out["boundary_case2_note"] = "needs n >= 4 (m >= 2)"
    return out


def coefficient_table(dims) -> list[dict]:
    """Exact boundary coefficients for ``m = n/2``."""
    rows = []
    for n in dims:
        m = n // 2
        rows.append({"n": n, "m": m, "case1": str(boundary_coefficient_1(m)),
                     "case2": str(boundary_coefficient_2(m)) if m >= 2 else None,
                     "tangential": str(tangential_coefficient(m))})
    return rows


def interior_numeric_oracle(jets: JetData, sandwich: bool, samples: int, seed: int):
    """Cubature and Monte Carlo integrals of the composed degree ``-n`` piece."""
    n = jets.n
    rep = build_rep(n)
    P = left_operator(rep, jets, sandwich)
    term = compose(P, inverse_power(rep, jets.perturbation, n), -n).term(-n)

    def integrand(pts):
        return np.trace(term.evaluate(pts), axis1=-2, axis2=-1)

    cub = complex(cubature_sphere_integral(n, integrand, max(term.numerator.degree, 2)))
    est, err = mc_sphere_oracle(n, integrand, samples, seed)
    return cub, complex(est), float(err)


def oracle_record(theorem: str, n: int, seed: int, samples: int) -> VerificationRecord:
    info = THEOREMS[theorem]
    check_validity(theorem, n)
    jets = JetData.random(n, seed, info.kind)
    rep = build_rep(n)
    if info.region == "interior":
        lhs = density_by_composition(rep, jets, info.sandwich)
        rhs, mc, err = interior_numeric_oracle(jets, info.sandwich, samples, seed)
        notes = f"cubature oracle; Monte Carlo {_cfmt(mc)} +/- {err:.2e} ({samples} samples)"
    else:
        parts = split_jets(jets, info.part)
        lhs = boundary_density(rep, parts, info.case, info.sandwich)
        rhs = boundary_numeric_oracle(rep, parts, info.case, info.sandwich)
        notes = "numeric xi_n contour oracle"
    abs_err, rel_err, status = classify(lhs, rhs, QUADRATURE_TOL)
    return VerificationRecord(theorem, n, seed, lhs, rhs, abs_err, rel_err, status, notes)


# ---------------------------------------------------------------------------
# CLI

def _dims(values) -> list[int]:
    out = []
    for v in values or []:
        for part in str(v).split(","):
            if part.strip():
                try:
                    out.append(int(part))
                except ValueError:
                    raise UsageError(f"bad dimension {part!r}") from None
    return out


def _theorems(values) -> list[str]:
    out = []
    for v in values or []:
        out += [p.strip() for p in str(v).split(",") if p.strip()]
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ncg-residue", description=__doc__.strip().split("\n\n")[0].replace("\n", " "))
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seeds=True):
        sp.add_argument("--dim", action="append", help="even dimension(s), repeatable or comma separated")
        sp.add_argument("--theorem", action="append", help="theorem id(s), repeatable or comma separated")
        sp.add_argument("--seed", type=int, default=0, help="first random seed")
        if seeds:
            sp.add_argument("--seeds", type=int, default=5, help="number of consecutive seeds")
        sp.add_argument("--format", choices=FORMATS, default="json")

    v = sub.add_parser("verify", help="compare pipeline values with closed forms")
    common(v)
    v.add_argument("--tolerance", type=float, default=SYMBOLIC_TOL)

    d = sub.add_parser("density", help="densities for a jets file")
    d.add_argument("--jets", required=True)
    d.add_argument("--format", choices=FORMATS, default="json")

    t = sub.add_parser("table", help="exact boundary coefficients")
    t.add_argument("--dim", action="append")
    t.add_argument("--format", choices=FORMATS, default="md")

    o = sub.add_parser("oracle", help="pipeline against numeric quadrature")
    common(o)
    o.add_argument("--samples", type=int, default=10_000, help="Monte Carlo samples for interior oracles")
    return p


def _seeds(args) -> list[int]:
    if args.seeds < 1:
        raise UsageError("--seeds must be at least 1")
    return list(range(args.seed, args.seed + args.seeds))


def _emit_rows(rows: list[dict], fmt: str) -> bytes:
    if fmt == "json":
        return (json.dumps(rows, indent=2, sort_keys=True) + "\n").encode()
    keys = list(dict.fromkeys(k for r in rows for k in r))
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, keys, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow(r)
        return buf.getvalue().encode()
    lines = ["| " + " | ".join(keys) + " |", "|" + "---|" * len(keys)]
    for r in rows:
        lines.append("| " + " | ".join("" if r.get(k) is None else str(r.get(k)) for k in keys) + " |")
    return ("\n".join(lines) + "\n").encode()


def _write(data: bytes):
    sys.stdout.buffer.write(data)
    sys.stdout.flush()


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        if args.command == "verify":
            config = SuiteConfig(_dims(args.dim) or list(DEFAULT_DIMS), _theorems(args.theorem) or list(THEOREMS),
                                 _seeds(args), args.tolerance, args.format)
            records, skipped = run_suite(config)
            for s in skipped:
                log.warning(s)
            _write(emit_report(records, config.fmt, skipped))
            return exit_code(records)
        if args.command == "density":
            jets, sandwich = load_jets(args.jets)
            _write(_emit_rows([density_report(jets, sandwich)], args.format))
            return 0
        if args.command == "table":
            dims = _dims(args.dim) or list(DEFAULT_DIMS)
            SuiteConfig(dims=dims).validate()
            _write(_emit_rows(coefficient_table(dims), args.format))
            return 0
        if args.command == "oracle":
            config = SuiteConfig(_dims(args.dim) or list(DEFAULT_DIMS), _theorems(args.theorem) or list(THEOREMS),
                                 _seeds(args), QUADRATURE_TOL, args.format).validate()
            if args.samples < 10_000:
                raise UsageError("--samples must be at least 10000")
            records, skipped = [], []
            for theorem in config.theorems:
                for n in config.dims:
                    try:
                        check_validity(theorem, n)
                    except ValidityError as exc:
                        skipped.append(f"{theorem} n={n}: skipped ({exc})")
                        continue
                    records += [oracle_record(theorem, n, s, args.samples) for s in config.seeds]
            for s in skipped:
                log.warning(s)
            _write(emit_report(records, config.fmt, skipped))
            return exit_code(records)
    except SchemaError as exc:
        print("error: jets file violates the schema:", file=sys.stderr)
        for f in exc.fields:
            print(f"  - {f}", file=sys.stderr)
        return 2
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResidueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
