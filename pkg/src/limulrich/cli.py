"""Command-line driver: run a JSON scenario, write CSV tables and a summary.

Exit codes: 0 all verdicts pass, 2 a guaranteed verdict failed, 3 a cap or
window was exceeded, 4 the input was malformed or inconsistent.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

import jsonschema

from . import grcomplex as gc
from . import grmod as gm
from . import monoring as mr
from . import mult, p1c, ulrichlab
from .errors import CapExceeded, InputError, NotShortComplex, NotSystemOfParameters
from .exactlin import FieldSpec

EXIT_OK, EXIT_VERDICT, EXIT_CAP, EXIT_INPUT = 0, 2, 3, 4

SUITES = {
    "dim1-det": "chi(F) = e(det phi, R) and chi(F) >= a e(R) for square complexes over 1-dimensional rings",
    "sci": "C(d,i) l(M) >= beta_i(M) e(R) over monomial complete intersections",
    "walker": "beta(F) >= 2^d |chi(F)| / sum l(H_i F)",
    "dutta": "chi((phi^*)^n F) / p^(nd) against chi(F)",
    "p1c-limits": "h^i(N(b_n(t))) / p^(nc) on (P^1)^c: zero-region decay and limits",
    "lim-ulrich-segre": "Segre lim Ulrich modules U_n: Hilbert function, e_d, nu, Koszul tails, trend flags",
    "lech": "l(S/J^m) >= m^2 e(J) / 2 for monomial ideals in k[x,y]",
}

# ---------------------------------------------------------------------------
# schema

_INT_LIST = {"type": "array", "items": {"type": "integer"}}
_RATIONAL = {"type": ["integer", "string"], "pattern": r"^-?\d+(/\d+)?$"}
_NAME_LIST = {"type": "array", "items": {"type": "string"}, "minItems": 1}
_POS = {"type": "integer", "minimum": 1}
_NONNEG = {"type": "integer", "minimum": 0}
_ELEMENT = {
    "oneOf": [
        {"type": "string", "minLength": 1},
        {"type": "object", "additionalProperties": {"type": "integer"}, "minProperties": 1},
    ]
}
_ENTRY = {"oneOf": [_ELEMENT, {"type": "null"}]}
_MATRIX = {"type": "array", "items": {"type": "array", "items": _ENTRY}}


def _obj(required: dict, optional: dict | None = None) -> dict:
    props = dict(required)
    props.update(optional or {})
    return {"type": "object", "properties": props, "required": sorted(required), "additionalProperties": False}


def _kind(name: str) -> dict:
    return {"const": name}


_RING = {
    "oneOf": [
        _obj({"kind": _kind("poly"), "nvars": _POS},
             {"names": {"type": "array", "items": {"type": "string"}}, "ideal": {"type": "array", "items": _INT_LIST},
              "dim": _NONNEG, "degree_cap": _POS}),
        _obj({"kind": _kind("segre"), "c": _POS}, {"degree_cap": _POS}),
    ]
}

_MODULE = {
    "oneOf": [
        _obj({"kind": _kind("free"), "ring": {"type": "string"}, "degrees": _INT_LIST}),
        _obj({"kind": _kind("cokernel"), "ring": {"type": "string"}, "target": _INT_LIST, "source": _INT_LIST,
              "matrix": _MATRIX}),
        _obj({"kind": _kind("residue"), "ring": {"type": "string"}}, {"degree": {"type": "integer"}}),
        _obj({"kind": _kind("gamma"), "ring": {"type": "string"}, "n": _NONNEG, "w": _INT_LIST}),
        _obj({"kind": _kind("lim-ulrich"), "ring": {"type": "string"}, "n": _NONNEG}),
    ]
}

_COMPLEX = {
    "oneOf": [
        _obj({"kind": _kind("koszul"), "ring": {"type": "string"},
              "elements": {"type": "array", "items": _ELEMENT, "minItems": 1}}),
        _obj({"kind": _kind("matrices"), "ring": {"type": "string"}, "terms": {"type": "array", "items": _INT_LIST},
              "diffs": {"type": "array", "items": _MATRIX}}),
        _obj({"kind": _kind("resolution"), "module": {"type": "string"}}, {"length_cap": _POS}),
    ]
}

_SUITE = {
    "oneOf": [
        _obj({"suite": _kind("dim1-det"), "complexes": _NAME_LIST}),
        _obj({"suite": _kind("sci"), "ring": {"type": "string"}, "modules": _NAME_LIST}, {"length_cap": _POS}),
        _obj({"suite": _kind("walker"), "complexes": _NAME_LIST}),
        _obj({"suite": _kind("dutta"), "complexes": _NAME_LIST, "n_max": _NONNEG}),
        _obj({"suite": _kind("p1c-limits"), "c": _POS, "p": _POS, "n_max": _NONNEG,
              "t_range": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
              "bundles": {"type": "array", "minItems": 1, "items": _obj(
                  {"weights": {"type": "array", "items": _INT_LIST, "minItems": 1}}, {"label": {"type": "string"}})}},
             {"tolerance": _RATIONAL}),
        _obj({"suite": _kind("lim-ulrich-segre"), "ring": {"type": "string"}, "n_max": _NONNEG,
              "sop": {"type": "array", "items": _ELEMENT, "minItems": 1}},
             {"tail_threshold": _RATIONAL, "ratio_threshold": _RATIONAL}),
        _obj({"suite": _kind("lech"), "m_max": _POS,
              "ideals": {"type": "array", "minItems": 1, "items": {"type": "array", "items": _INT_LIST}}}),
    ]
}

SCHEMA = _obj(
    {"schema": {"const": 1}, "field": _obj({"p": _POS}, {"e": _POS, "min_poly": _INT_LIST}),
     "suites": {"type": "array", "items": _SUITE, "minItems": 1}},
    {"label": {"type": "string"}, "output": {"type": "string"},
     "rings": {"type": "object", "additionalProperties": _RING},
     "modules": {"type": "object", "additionalProperties": _MODULE},
     "complexes": {"type": "object", "additionalProperties": _COMPLEX}},
)


def _specific(err: jsonschema.ValidationError) -> jsonschema.ValidationError:
    """Descend into the oneOf branch whose "kind"/"suite" tag matched."""
    while err.validator == "oneOf" and err.context:
        tagged = [e for e in err.context if e.validator != "const"
                  and not any(c.validator == "const" for c in err.context if c.schema_path[0] == e.schema_path[0])]
        if not tagged:
            break
        err = max(tagged, key=lambda e: len(e.absolute_path))
    return err


def load_scenario(path: str | Path) -> dict:
    """Parse and validate; InputError carries line/column for JSON syntax errors."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = _specific(jsonschema.exceptions.best_match(errors))
        where = "/".join(map(str, err.absolute_path)) or "<root>"
        raise InputError(f"{path}: at {where}: {err.message}")
    return data


# ---------------------------------------------------------------------------
# building objects


def _rational(x: Any) -> Fraction:
    return Fraction(str(x))


def decimal6(q: Fraction | int) -> str:
    q = Fraction(q)
    with localcontext() as ctx:
        ctx.prec = 60
        value = Decimal(q.numerator) / Decimal(q.denominator)
        return str(value.quantize(Decimal("0.000001"), rounding=ROUND_HALF_EVEN))


def rational(q: Fraction | int) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


class Workspace:
    """Named rings, modules and complexes of one scenario, built on first use."""

    def __init__(self, data: dict, degree_cap: int | None = None):
        f = data["field"]
        e = f.get("e", 1)
        if "min_poly" in f:
            self.field = FieldSpec(f["p"], e, tuple(f["min_poly"]))
        else:
            self.field = FieldSpec.gf(f["p"], e)
        self.data = data
        self.degree_cap = degree_cap
        self._built: dict[tuple[str, str], Any] = {}
        self._check_references()

    def _check_references(self) -> None:
        rings = self.data.get("rings", {})
        modules = self.data.get("modules", {})
        complexes = self.data.get("complexes", {})

        def need(kind: str, table: dict, name: str, where: str) -> None:
            if name not in table:
                raise InputError(f"{where}: undeclared {kind} {name!r}")

        for name, spec in modules.items():
            need("ring", rings, spec["ring"], f"modules/{name}")
        for name, spec in complexes.items():
            if "ring" in spec:
                need("ring", rings, spec["ring"], f"complexes/{name}")
            if "module" in spec:
                need("module", modules, spec["module"], f"complexes/{name}")
        for k, suite in enumerate(self.data["suites"]):
            where = f"suites/{k}"
            if "ring" in suite:
                need("ring", rings, suite["ring"], where)
            for name in suite.get("modules", []):
                need("module", modules, name, where)
            for name in suite.get("complexes", []):
                need("complex", complexes, name, where)

    def _memo(self, kind: str, name: str, build: Callable[[], Any]) -> Any:
        key = (kind, name)
        if key not in self._built:
            self._built[key] = build()
        return self._built[key]

    def ring(self, name: str) -> mr.GradedRingSpec:
        def build():
            spec = self.data["rings"][name]
            cap = self.degree_cap or spec.get("degree_cap", mr.DEFAULT_DEGREE_CAP)
            if spec["kind"] == "segre":
                return mr.segre_ring(self.field, spec["c"], degree_cap=cap, label=name)
            ideal = spec.get("ideal", [])
            if any(len(g) != spec["nvars"] for g in ideal):
                raise InputError(f"rings/{name}: ideal generators must have {spec['nvars']} exponents")
            return mr.poly_ring(self.field, spec["nvars"], ideal, spec.get("dim"), cap, spec.get("names"), name)

        return self._memo("ring", name, build)

    def element(self, ring: mr.GradedRingSpec, spec: Any) -> mr.RingElement | None:
        if spec is None:
            return None
        if isinstance(spec, dict):
            # coefficient vector over named monomials
            terms = [f"{c % self.field.p if self.field.e == 1 else c}*{m}" for m, c in spec.items() if c]
            if not terms:
                return None
            spec = " + ".join(terms)
        e = mr.parse_element(ring, spec)
        return None if e.is_zero() else e

    def matrix(self, ring, rows) -> list[list]:
        return [[self.element(ring, x) for x in row] for row in rows]

    def module(self, name: str) -> gm.GradedModule:
        def build():
            spec = self.data["modules"][name]
            ring = self.ring(spec["ring"])
            kind = spec["kind"]
            if kind == "free":
                M = gm.FreeModule(ring, spec["degrees"])
            elif kind == "cokernel":
                M = gm.cokernel(ring, spec["target"], spec["source"], self.matrix(ring, spec["matrix"]), name)
            elif kind == "residue":
                M = gm.residue_field(ring, spec.get("degree", 0))
            elif kind == "gamma":
                M = gm.GammaSegreModule(ring, spec["n"], spec["w"])
            else:
                M = ulrichlab.build_lim_ulrich_segre(ring.c or 0, ring.p, spec["n"], ring)
            M.label = name
            return M

        return self._memo("module", name, build)

    def complex(self, name: str) -> gc.FreeComplex:
        def build():
            spec = self.data["complexes"][name]
            kind = spec["kind"]
            if kind == "resolution":
                M = self.module(spec["module"])
                F = gc.minimal_free_resolution(M.ring, M, length_cap=spec.get("length_cap", 10))
            else:
                ring = self.ring(spec["ring"])
                if kind == "koszul":
                    elems = [self.element(ring, x) for x in spec["elements"]]
                    if any(e is None for e in elems):
                        raise InputError(f"complexes/{name}: Koszul elements must be nonzero")
                    F = gc.koszul_complex(ring, elems)
                else:
                    F = gc.FreeComplex(ring, spec["terms"], [self.matrix(ring, d) for d in spec["diffs"]])
            F.label = name
            return F

        return self._memo("complex", name, build)


# ---------------------------------------------------------------------------
# suites


@dataclass
class SuiteResult:
    name: str
    header: list[str]
    rows: list[list[Any]] = field(default_factory=list)
    lines: list[str] = field(default_factory=list)
    failed: bool = False  # a guaranteed verdict failed

    def verdict(self, ok: bool, guaranteed: bool = True) -> str:
        if not ok and guaranteed:
            self.failed = True
        return "pass" if ok else ("FAIL" if guaranteed else "fail (not guaranteed)")


def suite_dim1(ws: Workspace, spec: dict) -> SuiteResult:
    res = SuiteResult("dim1-det", ["complex", "a", "det", "chi_F", "chi_det", "e_R", "a_e_R", "equality",
                                   "inequality", "verdict"])
    for name in spec["complexes"]:
        r = mult.dim1_det_check(ws.complex(name))
        v = res.verdict(r.passed)
        res.rows.append([name, r.a, r.det, r.chi_F, r.chi_det, r.e_R, r.a * r.e_R, r.equality, r.inequality, v])
        res.lines.append(f"{name}: chi = {r.chi_F}, e(det) = {r.chi_det}, a e(R) = {r.a * r.e_R}: {v}")
    return res


def suite_sci(ws: Workspace, spec: dict) -> SuiteResult:
    res = SuiteResult("sci", ["module", "i", "length", "beta_i", "e_R", "left", "right", "margin", "verdict"])
    ring = ws.ring(spec["ring"])
    mods = [ws.module(m) for m in spec["modules"]]
    suite = ulrichlab.sci_suite(ring, mods, spec.get("length_cap", 10))
    for name, r in zip(spec["modules"], suite.results):
        rep = r.report
        for row in rep.rows:
            res.rows.append([name, row.i, r.length, rep.betti[row.i], rep.e, row.left, row.right, row.margin,
                             res.verdict(row.verdict)])
        res.lines.append(f"{name}: l = {r.length}, beta = {rep.betti}, e(R) = {rep.e}, margins {rep.margins}")
    return res


def suite_walker(ws: Workspace, spec: dict) -> SuiteResult:
    res = SuiteResult("walker", ["complex", "beta", "chi", "total_length", "bound", "bound_decimal", "guaranteed",
                                 "verdict"])
    for name in spec["complexes"]:
        r = ulrichlab.check_walker(ws.complex(name))
        v = res.verdict(r.passed, r.guaranteed)
        res.rows.append([name, r.beta, r.chi, r.total_length, rational(r.bound), decimal6(r.bound), r.guaranteed, v])
        note = "" if r.guaranteed else " (informational: p = 2)"
        res.lines.append(f"{name}: beta = {r.beta} >= {r.bound}: {v}{note}")
    return res


def suite_dutta(ws: Workspace, spec: dict) -> SuiteResult:
    res = SuiteResult("dutta", ["complex", "n", "term", "term_decimal", "chi", "verdict"])
    for name in spec["complexes"]:
        r = mult.dutta_multiplicity(ws.complex(name), spec["n_max"])
        for n, x in enumerate(r.terms):
            res.rows.append([name, n, rational(x), decimal6(x), r.chi, res.verdict(x == r.chi)])
        if r.truncated:
            raise CapExceeded(f"dutta {name}: {r.message}")
        res.lines.append(f"{name}: terms {[str(x) for x in r.terms]}, chi = {r.chi}, stable = {r.stable}")
    return res


def suite_p1c(ws: Workspace, spec: dict) -> SuiteResult:
    res = SuiteResult("p1c-limits", ["bundle", "i", "t", "n", "numerator", "denominator", "ratio", "ratio_decimal",
                                     "region", "limit", "constant", "verdict"])
    c, p = spec["c"], spec["p"]
    lo, hi = spec["t_range"]
    tol = _rational(spec.get("tolerance", "1/4"))
    for b in spec["bundles"]:
        N = p1c.LineBundleSum(c, tuple(tuple(w) for w in b["weights"]))
        label = b.get("label", str(N))
        cells = p1c.lim_ulrich_sheaf_table(N, p, range(spec["n_max"] + 1), range(lo, hi + 1), tol)
        bad = 0
        for cell in cells:
            v = cell.verdict
            if v == "FAIL":
                res.failed = True
                bad += 1
            res.rows.append([label, cell.i, cell.t, cell.n, cell.value, p ** (cell.n * c), rational(cell.ratio),
                             decimal6(cell.ratio),
                             cell.region, rational(cell.limit), rational(cell.constant),
                             "pass" if v == "ok" else v])
        res.lines.append(f"{label}: {len(cells)} cells, {bad} failing")
    return res


def suite_lim_segre(ws: Workspace, spec: dict) -> SuiteResult:
    ring = ws.ring(spec["ring"])
    if ring.kind != "segre":
        raise InputError("lim-ulrich-segre needs a Segre ring")
    c, p = ring.c, ring.p
    sop = [ws.element(ring, x) for x in spec["sop"]]
    if any(e is None for e in sop):
        raise InputError("sop elements must be nonzero")
    mult.verify_sop(ring, sop)
    kwargs = {k: _rational(spec[k]) for k in ("tail_threshold", "ratio_threshold") if k in spec}
    ns = range(spec["n_max"] + 1)
    diag = ulrichlab.lim_sequence_diagnostics(lambda n: ulrichlab.build_lim_ulrich_segre(c, p, n, ring), sop, ns,
                                              **kwargs)
    d = ring.declared_dim
    res = SuiteResult("lim-ulrich-segre", ["n", "nu", "e_d", "e_d_expected", "hf_closed_form"]
                      + [f"h{i}" for i in range(d + 1)]
                      + ["ratio", "ratio_decimal", "tail", "tail_decimal", "chi1", "chi1_decimal", "verdict"])
    for row in diag.rows:
        U = ulrichlab.build_lim_ulrich_segre(c, p, row.n, ring)
        hf_ok = all(U.dim(t) == p1c.gamma_hilbert_function(c, p, row.n, t) for t in range(-c - 1, 2 * c + 3))
        expected = math.factorial(c) * p ** (row.n * c)
        v = res.verdict(hf_ok and row.e_d == expected)
        res.rows.append([row.n, row.nu, row.e_d, expected, hf_ok, *row.koszul, rational(row.ratio),
                         decimal6(row.ratio), rational(row.tail), decimal6(row.tail), rational(row.chi1),
                         decimal6(row.chi1), v])
    # trend flags summarize finite data; they are reported, never fatal
    res.lines.append(f"lim-CM trend: {'pass' if diag.lim_cm_trend else 'fail'} "
                     f"(tails {[str(x) for x in diag.tails]}, threshold {diag.tail_threshold})")
    res.lines.append(f"lim-Ulrich trend: {'pass' if diag.lim_ulrich_trend else 'fail'} "
                     f"(|ratio - 1| {[str(x) for x in diag.ratio_gaps]}, threshold {diag.ratio_threshold})")
    res.lines.append(f"final tail below first: {diag.tail_shrinks}; chi1/nu weakly decreasing: "
                     f"{diag.chi1_weakly_decreasing}")
    return res


def _xy_monomial(a: int, b: int) -> str:
    parts = [v if e == 1 else f"{v}^{e}" for v, e in (("x", a), ("y", b)) if e]
    return "*".join(parts) or "1"


def suite_lech(ws: Workspace, spec: dict) -> SuiteResult:
    res = SuiteResult("lech", ["ideal", "m", "colength", "multiplicity", "bound", "bound_decimal", "verdict"])
    for gens in spec["ideals"]:
        if any(len(g) != 2 for g in gens):
            raise InputError("Lech ideals are given by exponent pairs")
        J = mult.parse_monomial_ideal(gens)
        label = "(" + ",".join(_xy_monomial(a, b) for a, b in J.gens) + ")"
        for m in range(1, spec["m_max"] + 1):
            r = mult.lech_check(J, m)
            res.rows.append([label, m, r.colength, r.multiplicity, rational(r.bound), decimal6(r.bound),
                             res.verdict(r.passed)])
        res.lines.append(f"{label}: e = {mult.monomial_multiplicity(J)}")
    return res


RUNNERS: dict[str, Callable[[Workspace, dict], SuiteResult]] = {
    "dim1-det": suite_dim1,
    "sci": suite_sci,
    "walker": suite_walker,
    "dutta": suite_dutta,
    "p1c-limits": suite_p1c,
    "lim-ulrich-segre": suite_lim_segre,
    "lech": suite_lech,
}


def _cell(x: Any) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, Fraction):
        return rational(x)
    return str(x)


def write_csv(path: Path, res: SuiteResult) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(res.header)
        for row in res.rows:
            w.writerow([_cell(x) for x in row])


def run(scenario_path: str | Path, out: str | Path | None = None, degree_cap: int | None = None,
        stream=None) -> int:
    """Run one scenario; returns the exit code and writes CSVs plus summary.txt."""
    stream = stream if stream is not None else sys.stdout
    try:
        data = load_scenario(scenario_path)
        ws = Workspace(data, degree_cap)
    except (InputError, NotSystemOfParameters, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out_dir = Path(out or data.get("output") or "out")
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = [f"scenario: {data.get('label', Path(scenario_path).stem)}"]
    code = EXIT_OK
    used: dict[str, int] = {}
    for spec in data["suites"]:
        name = spec["suite"]
        used[name] = used.get(name, 0) + 1
        stem = name if used[name] == 1 else f"{name}-{used[name]}"
        try:
            res = RUNNERS[name](ws, spec)
        except CapExceeded as exc:
            summary.append(f"[{stem}] cap exceeded: {exc}")
            code = max(code, EXIT_CAP)
            break
        except (InputError, NotSystemOfParameters, NotShortComplex) as exc:
            summary.append(f"[{stem}] input error: {exc}")
            code = EXIT_INPUT
            break
        write_csv(out_dir / f"{stem}.csv", res)
        status = "FAIL" if res.failed else "PASS"
        summary.append(f"[{stem}] {status}")
        summary.extend(f"  {line}" for line in res.lines)
        if res.failed:
            code = max(code, EXIT_VERDICT)
    summary.append(f"exit code: {code}")
    (out_dir / "summary.txt").write_text("\n".join(summary) + "\n", encoding="utf-8")
    print("\n".join(summary), file=stream)
    return code


def list_suites() -> list[tuple[str, str]]:
    return list(SUITES.items())


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="limulrich", description="Run graded commutative algebra checks.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a scenario file")
    p_run.add_argument("scenario")
    p_run.add_argument("--out", help="output directory (default: scenario 'output' or ./out)")
    p_run.add_argument("--threads", type=int, default=1, help="accepted for compatibility; work runs sequentially")
    p_run.add_argument("--degree-cap", type=int, help="override every ring's degree cap")
    sub.add_parser("suites", help="list built-in suites")
    args = parser.parse_args(argv)
    if args.command == "suites":
        for name, desc in list_suites():
            print(f"{name:18s} {desc}")
        return EXIT_OK
    if args.threads < 1 or (args.degree_cap is not None and args.degree_cap < 1):
        print("input error: --threads and --degree-cap must be positive", file=sys.stderr)
        return EXIT_INPUT
    return run(args.scenario, args.out, args.degree_cap)


if __name__ == "__main__":
    sys.exit(main())
