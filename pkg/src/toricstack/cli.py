"""Batch runner: read a problem file, run its tasks, write JSON reports.

Usage::

    toricstack --input problem.json --out reports/ [--truncation N] [--jobs N]
               [--qrr-sign paper|alternate|both]

Exit status is 0 when every task passes, 1 when some verification fails and 2
for input errors (malformed file, or a library precondition raised inside a
task).  Diagnostics name the offending field, e.g. ``tasks[1].sigma``.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import errors
from .degrees import DegreeFunctional, admissible_c, congruence_holds, enumerate_degrees, football_map, pairings_hold, reduce
from .errors import ParseError, TaskError, ToricStackError
from .gfunc import check_g_identities, gerbe_rescale, qrr_report
from .ifunc import BundleData, IContext, check_C1, check_C2, i_restriction, rec_coefficient, rec_coefficient_derived
from .report import Report, jsonable
from .stackyfan import StackyFan, _cone, check_sequences, validate
from .symring import BaseAlgebra, render

TASKS = ("validate", "boxes", "extend", "degrees", "ifunction", "rec", "check-c1", "check-c2", "check-qrr", "morphisms")
CONVENTIONS = ("paper", "alternate", "both")

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

#: every library error code; ``TaskError`` reports carry one of these as ``cause``
DIAGNOSTIC_CODES = {
    cls.code: cls.__name__
    for cls in vars(errors).values()
    if isinstance(cls, type) and issubclass(cls, ToricStackError)
}


# --- parsing ---------------------------------------------------------------


def parse_rational(x, field: str) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise ParseError("rationals must be integers or \"p/q\" strings", field)
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise ParseError(f"cannot read {x!r} as a rational", field)


def parse_int(x, field: str, lo: int | None = None) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ParseError(f"expected an integer, got {x!r}", field)
    if lo is not None and x < lo:
        raise ParseError(f"expected an integer >= {lo}, got {x}", field)
    return x


def parse_int_list(x, field: str, length: int | None = None) -> list:
    if not isinstance(x, list):
        raise ParseError("expected a list of integers", field)
    if length is not None and len(x) != length:
        raise ParseError(f"expected {length} entries, got {len(x)}", field)
    return [parse_int(v, f"{field}[{i}]") for i, v in enumerate(x)]


@dataclass
class Problem:
    raw: dict
    fan: StackyFan
    s_vectors: list
    bundle: BundleData
    truncation: Fraction
    functional: DegreeFunctional
    qrr_sign: str
    tasks: list  # (name, params)
    name: str = ""

    def context(self) -> IContext:
        return IContext(self.fan.extend(self.s_vectors), self.bundle, self.functional)


def parse_problem(raw, truncation=None, qrr_sign=None) -> Problem:
    if not isinstance(raw, dict):
        raise ParseError("top level must be an object")
    known = {"name", "group", "rays", "max_cones", "s_vectors", "bundle", "tasks", "truncation",
             "degree_functional", "qrr_sign_convention", "description"}
    for k in raw:
        if k not in known:
            raise ParseError("unknown field", k)
    group = raw.get("group")
    if not isinstance(group, dict):
        raise ParseError("expected {rank, torsion}", "group")
    rank = parse_int(group.get("rank"), "group.rank", 0)
    torsion = parse_int_list(group.get("torsion", []), "group.torsion")
    for i, t in enumerate(torsion):
        if t < 2:
            raise ParseError("torsion orders must be >= 2", f"group.torsion[{i}]")
    dim = rank + len(torsion)
    rays = raw.get("rays")
    if not isinstance(rays, list) or not rays:
        raise ParseError("expected a nonempty list of ray vectors", "rays")
    rays = [parse_int_list(r, f"rays[{i}]", dim) for i, r in enumerate(rays)]
    cones = raw.get("max_cones")
    if not isinstance(cones, list) or not cones:
        raise ParseError("expected a nonempty list of cones", "max_cones")
    cones = [parse_int_list(c, f"max_cones[{i}]") for i, c in enumerate(cones)]
    for i, c in enumerate(cones):
        for k, idx in enumerate(c):
            if not 0 <= idx < len(rays):
                raise ParseError(f"ray index {idx} out of range 0..{len(rays) - 1}", f"max_cones[{i}][{k}]")
    s_vectors = raw.get("s_vectors", [])
    if not isinstance(s_vectors, list):
        raise ParseError("expected a list of vectors", "s_vectors")
    s_vectors = [parse_int_list(s, f"s_vectors[{i}]", dim) for i, s in enumerate(s_vectors)]
    n, m = len(rays), len(s_vectors)

    bundle_raw = raw.get("bundle", {"base": "point"})
    if not isinstance(bundle_raw, dict):
        raise ParseError("expected {base, lambda_degrees}", "bundle")
    base_raw = bundle_raw.get("base", "point")
    if base_raw == "point":
        base = BaseAlgebra.point()
    elif isinstance(base_raw, dict) and set(base_raw) == {"projective"}:
        base = BaseAlgebra.projective(parse_int(base_raw["projective"], "bundle.base.projective", 1))
    else:
        raise ParseError("expected \"point\" or {\"projective\": N}", "bundle.base")
    lam_deg = parse_int_list(bundle_raw.get("lambda_degrees", []), "bundle.lambda_degrees")
    if len(lam_deg) > n + m:
        raise ParseError(f"at most {n + m} entries", "bundle.lambda_degrees")
    bundle = BundleData(base, tuple(lam_deg))

    T = parse_rational(raw.get("truncation", 2), "truncation") if truncation is None else Fraction(truncation)
    if T < 0:
        raise ParseError("must be >= 0", "truncation")
    fw = raw.get("degree_functional")
    if fw is None:
        functional = DegreeFunctional()
    else:
        if not isinstance(fw, list) or len(fw) != n + m:
            raise ParseError(f"expected {n + m} rationals", "degree_functional")
        functional = DegreeFunctional(tuple(parse_rational(v, f"degree_functional[{i}]") for i, v in enumerate(fw)))
    sign = qrr_sign or raw.get("qrr_sign_convention", "both")
    if sign not in CONVENTIONS:
        raise ParseError(f"expected one of {', '.join(CONVENTIONS)}", "qrr_sign_convention")

    tasks_raw = raw.get("tasks")
    if not isinstance(tasks_raw, list) or not tasks_raw:
        raise ParseError("expected a nonempty list of tasks", "tasks")
    tasks = []
    for i, t in enumerate(tasks_raw):
        params = {"task": t} if isinstance(t, str) else t
        if not isinstance(params, dict) or params.get("task") not in TASKS:
            raise ParseError(f"unknown task; expected one of {', '.join(TASKS)}", f"tasks[{i}]")
        tasks.append((params["task"], _parse_params(params, f"tasks[{i}]", n, dim)))
    fan = StackyFan.from_rays(rays, cones, torsion=torsion, rank=rank)
    name = raw.get("name", "")
    if not isinstance(name, str):
        raise ParseError("expected a string", "name")
    return Problem(raw, fan, s_vectors, bundle, T, functional, sign, tasks, name)


def _parse_params(params: dict, where: str, n: int, dim: int) -> dict:
    out = {}
    for key, val in params.items():
        f = f"{where}.{key}"
        if key == "task":
            continue
        if key in ("sigma", "sigma_prime"):
            out[key] = tuple(parse_int_list(val, f))
            for k, idx in enumerate(out[key]):
                if not 0 <= idx < n:
                    raise ParseError(f"ray index {idx} out of range", f"{f}[{k}]")
        elif key == "b":
            out[key] = tuple(parse_int_list(val, f, dim))
        elif key in ("c", "c_max", "truncation"):
            out[key] = parse_rational(val, f)
        elif key in ("order", "x_order", "z_order", "exp_order"):
            out[key] = parse_int(val, f, 0)
        elif key == "y":
            if not isinstance(val, list):
                raise ParseError("expected a list of rationals", f)
            out[key] = [parse_rational(v, f"{f}[{i}]") for i, v in enumerate(val)]
        elif key == "mu":
            if not isinstance(val, list):
                raise ParseError("expected a list of [mu, b] pairs", f)
            pairs = []
            for i, p in enumerate(val):
                if not isinstance(p, list) or len(p) != 2:
                    raise ParseError("expected [mu, b]", f"{f}[{i}]")
                pairs.append((parse_rational(p[0], f"{f}[{i}][0]"), parse_rational(p[1], f"{f}[{i}][1]")))
            out[key] = pairs
        else:
            raise ParseError("unknown task parameter", f)
    return out


def load_problem(path, truncation=None, qrr_sign=None) -> Problem:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(str(exc), "--input") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_problem(raw, truncation, qrr_sign)


# --- tasks -----------------------------------------------------------------


def _merge(name: str, parts: list, info: dict | None = None) -> Report:
    rep = Report(name, info=dict(info or {}))
    for sub in parts:
        for c in sub.checks:
            c.label = f"{sub.name} :: {c.label}"
            rep.checks.append(c)
    return rep


def _cones(prob: Problem, params: dict) -> list:
    if "sigma" in params:
        sigma = _cone(params["sigma"])
        if sigma not in prob.fan.top_cones():
            raise errors.SingularCone(f"{list(sigma)} is not a top-dimensional cone")
        return [sigma]
    return prob.fan.top_cones()


def _boxes(prob: Problem, sigma, params: dict) -> list:
    boxes = prob.fan.box_of_cone(sigma)
    if "b" in params:
        want = prob.fan.group.reduce(params["b"])
        boxes = [b for b in boxes if b.element == want]
        if not boxes:
            raise errors.FractionalPartMismatch(f"{list(params['b'])} is not in Box({list(sigma)})")
    return boxes


def _pairs(prob: Problem, params: dict) -> list:
    if "sigma" in params or "sigma_prime" in params:
        sigma, sp = params.get("sigma", ()), params.get("sigma_prime", ())
        pair = prob.fan.adjacent(sigma, sp)
        if pair is None:
            raise errors.NotAdjacent(f"cones {list(sigma)} and {list(sp)} are not adjacent top cones")
        return [pair]
    return prob.fan.adjacent_pairs()


def _cs(prob: Problem, pair, b, params: dict) -> list:
    if "c" in params:
        return [params["c"]]
    return admissible_c(prob.fan, pair.sigma, pair.sigma_prime, b, params.get("c_max", _trunc(prob, params)))


def _trunc(prob: Problem, params: dict) -> Fraction:
    return params.get("truncation", prob.truncation)


def _box_dict(b) -> dict:
    return {"element": list(b.element), "fracs": list(b.fracs), "age": b.age, "minimal_cone": list(b.minimal_cone)}


def task_validate(prob: Problem, params: dict) -> Report:
    vr = validate(prob.fan)
    rep = Report("validate")
    for v in vr.violations:
        rep.add(f"{v.kind} at {list(v.where)}", False, lhs=v.detail)
    if vr.ok:
        rep.add("fan is valid", True)
        for c in check_sequences(prob.fan.extend(prob.s_vectors)).checks:
            rep.checks.append(c)
        rep.info.update(top_cones=[list(c) for c in prob.fan.top_cones()],
                        anticones=sorted(list(a) for a in prob.fan.anticones()))
    return rep


def task_boxes(prob: Problem, params: dict) -> Report:
    fan = prob.fan
    rep = Report("boxes")
    tors = 1
    for t in fan.group.torsion:
        tors *= t
    listing = {}
    for sigma in _cones(prob, params):
        boxes = fan.box_of_cone(sigma)
        from .intlin import det

        expected = abs(det(fan.cone_matrix(sigma))) * tors
        rep.add(f"|Box({list(sigma)})| = |det| * |torsion|", len(boxes) == expected, lhs=len(boxes), rhs=expected)
        for b in boxes:
            bh = fan.box_involution(b)
            nz = sum(1 for f in b.fracs if f)
            rep.add(f"sigma={list(sigma)} b={list(b.element)} age(b) + age(inv b) = #nonzero",
                    b.age + bh.age == nz, lhs=b.age + bh.age, rhs=nz)
            rep.add(f"sigma={list(sigma)} b={list(b.element)} inv(inv b) = b",
                    fan.box_involution(bh).element == b.element)
        listing[str(list(sigma))] = [dict(_box_dict(b), inverse=list(fan.box_involution(b).element)) for b in boxes]
    rep.info["box"] = listing
    return rep


def task_extend(prob: Problem, params: dict) -> Report:
    ext = prob.fan.extend(prob.s_vectors)
    seq = check_sequences(ext)
    rep = Report("extend", list(seq.checks))
    extra = set(range(ext.n, ext.n + ext.m))
    for a in sorted(ext.anticones_s):
        rep.add(f"extended anticone {list(a)} contains every extension index", extra <= set(a))
    rep.info.update(
        L_rank=ext.gale.kernel_rank,
        kernel=[list(r) for r in ext.gale.kernel_basis],
        rho_s=[list(r) for r in ext.rho_s],
        anticones=sorted(list(a) for a in ext.anticones_s),
        splittings=[{"cone": list(c), "coefficients": list(k)} for c, k in ext.s_splittings],
    )
    return rep


def task_degrees(prob: Problem, params: dict) -> Report:
    ctx = prob.context()
    T = _trunc(prob, params)
    rep = Report("degrees")
    out = {}
    boxes = prob.fan.box() if "b" not in params else [
        b for b in prob.fan.box() if b.element == prob.fan.group.reduce(params["b"])]
    for b in boxes:
        degs = enumerate_degrees(ctx.ext, b, T, ctx.functional)
        for d in degs:
            v = reduce(ctx.ext, d.coords)
            rep.add(f"b={list(b.element)} lam=({','.join(map(str, d.coords))}) reduces to b", v.element == b.element)
        out[str(list(b.element))] = [list(d.coords) for d in degs]
    rep.info.update(truncation=T, degrees=out)
    return rep


def task_ifunction(prob: Problem, params: dict) -> Report:
    ctx = prob.context()
    T = _trunc(prob, params)
    rep = Report("ifunction")
    out = {}
    for sigma in _cones(prob, params):
        for b in _boxes(prob, sigma, params):
            series = i_restriction(ctx, sigma, b, T)
            zero = (0, tuple(Fraction(0) for _ in range(ctx.size)))
            const = series.get(zero)
            if b.is_zero():
                ok = const is not None and const == ctx.ring.one()
                expected = "1"
            else:
                ok = const is None or const.is_zero()
                expected = "0"
            rep.add(f"sigma={list(sigma)} b={list(b.element)} constant term", ok,
                    lhs=render(const) if const is not None else "0", rhs=expected)
            out[f"{list(sigma)} {list(b.element)}"] = [
                {"D": D, "lam": list(lam), "value": render(v)} for (D, lam), v in series.items() if not v.is_zero()
            ]
    rep.info.update(truncation=T, series=out)
    return rep


def task_rec(prob: Problem, params: dict) -> Report:
    ctx = prob.context()
    rep = Report("rec")
    rows = []
    for pair in _pairs(prob, params):
        for b in _boxes(prob, pair.sigma, params):
            for c in _cs(prob, pair, b, params):
                closed = rec_coefficient(ctx, pair.sigma, pair.sigma_prime, b, c)
                derived = rec_coefficient_derived(ctx, pair.sigma, pair.sigma_prime, b, c)
                rows.append({
                    "sigma": list(pair.sigma), "sigma_prime": list(pair.sigma_prime), "b": list(b.element),
                    "b_prime": list(closed.b_prime.element), "c": closed.c, "c_prime": closed.c_prime,
                    "closed": render(closed.value), "derived": render(derived.value),
                    "closed_equals_minus_derived": closed.value == -derived.value,
                })
    rep.add("recursion coefficients computed", True, count=len(rows))
    rep.info["coefficients"] = rows
    return rep


def task_check_c1(prob: Problem, params: dict) -> Report:
    ctx = prob.context()
    T = _trunc(prob, params)
    parts = [check_C1(ctx, sigma, b, T) for sigma in _cones(prob, params) for b in _boxes(prob, sigma, params)]
    return _merge("check-c1", parts, {"truncation": T})


def task_check_c2(prob: Problem, params: dict) -> Report:
    ctx = prob.context()
    T = _trunc(prob, params)
    parts = []
    for pair in _pairs(prob, params):
        for b in _boxes(prob, pair.sigma, params):
            for c in _cs(prob, pair, b, params):
                parts.append(check_C2(ctx, pair.sigma, pair.sigma_prime, b, c, T))
    closed = {p.name: p.info["closed_form_holds"] for p in parts}
    return _merge("check-c2", parts, {"truncation": T, "closed_form_holds": closed,
                                      "closed_form_holds_everywhere": all(closed.values())})


def task_check_qrr(prob: Problem, params: dict) -> Report:
    ctx = prob.context()
    T = _trunc(prob, params)
    order = params.get("order", 6)
    parts = []
    for y in params.get("y", [Fraction(0), Fraction(1, 2), Fraction(1, 3)]):
        parts.append(check_g_identities(y, params.get("x_order", 4), params.get("z_order", 4), params.get("exp_order", 8)))
    pairs = set(params.get("mu", []))
    gerbe = {}
    if "mu" not in params:
        for sigma in _cones(prob, params):
            for b in _boxes(prob, sigma, params):
                for (D, lam), v in i_restriction(ctx, sigma, b, T).items():
                    if not v.is_zero():
                        for i in sigma:
                            pairs.add((Fraction(lam[i]) - ctx.bundle.pairing(i, D), b.frac(i)))
            g = gerbe_rescale(ctx, sigma, T)
            gerbe[str(list(sigma))] = [
                {"b": list(k[0]), "D": k[1], "Q_exponents": list(k[2]), "q_exponents": list(k[3]), "J": render(v)}
                for k, v in sorted(g.terms.items())
            ]
    qrr = qrr_report(sorted(pairs), order, prob.qrr_sign)
    parts.append(qrr)
    return _merge("check-qrr", parts, {"order": order, "conventions": qrr.info["conventions"],
                                       "holding": qrr.info["holding"], "gerbe_rescale": gerbe})


def task_morphisms(prob: Problem, params: dict) -> Report:
    fan = prob.fan
    rep = Report("morphisms")
    rows = []
    for pair in _pairs(prob, params):
        for b in _boxes(prob, pair.sigma, params):
            for c in _cs(prob, pair, b, params):
                fm = football_map(fan, pair.sigma, pair.sigma_prime, b, c)
                label = f"sigma={list(fm.sigma)} sigma'={list(fm.sigma_prime)} b={list(b.element)} c={fm.c}"
                rep.add(f"{label} congruence", congruence_holds(fan, fm))
                rep.add(f"{label} pairings", pairings_hold(fan, fm))
                rows.append({"sigma": list(fm.sigma), "sigma_prime": list(fm.sigma_prime), "j": fm.j,
                             "j_prime": fm.j_prime, "b": list(b.element), "c": fm.c, "b_prime": list(fm.b_prime.element),
                             "c_prime": fm.c_prime, "r1": fm.r1, "r2": fm.r2, "degree": list(fm.degree)})
    rep.info["football_maps"] = rows
    return rep


HANDLERS = {
    "validate": task_validate,
    "boxes": task_boxes,
    "extend": task_extend,
    "degrees": task_degrees,
    "ifunction": task_ifunction,
    "rec": task_rec,
    "check-c1": task_check_c1,
    "check-c2": task_check_c2,
    "check-qrr": task_check_qrr,
    "morphisms": task_morphisms,
}


def run_task(prob: Problem, index: int) -> dict:
    """One task as a JSON-ready dict; library errors become ``TaskError`` entries."""
    name, params = prob.tasks[index]
    field = f"tasks[{index}]"
    if name != "validate" and not validate(prob.fan).ok:
        err = TaskError(errors.InvalidFan("the fan fails validation; run the validate task for details"), field)
        return _error_entry(name, index, err)
    try:
        rep = HANDLERS[name](prob, params)
    except ToricStackError as exc:
        return _error_entry(name, index, TaskError(exc, field))
    d = rep.to_dict()
    d.update(task=name, index=index, status="pass" if rep.passed else "fail")
    return d


def _error_entry(name: str, index: int, err: TaskError) -> dict:
    return {"task": name, "index": index, "status": "error", "passed": False,
            "error": {"code": err.code, "cause": err.cause.code, "field": err.field, "message": str(err.cause)}}


def _run_task_raw(args) -> dict:
    raw, truncation, qrr_sign, index = args
    return run_task(parse_problem(raw, truncation, qrr_sign), index)


def run(prob: Problem, jobs: int = 1, truncation=None, qrr_sign=None) -> tuple:
    """Run every task; returns ``(exit_status, summary, reports)`` with reports in task order."""
    n = len(prob.tasks)
    if jobs > 1 and n > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_run_task_raw, [(prob.raw, truncation, qrr_sign, i) for i in range(n)]))
    else:
        reports = [run_task(prob, i) for i in range(n)]
    if any(r["status"] == "error" for r in reports):
        status = EXIT_INPUT
    elif all(r["status"] == "pass" for r in reports):
        status = EXIT_PASS
    else:
        status = EXIT_FAIL
    summary = {
        "name": prob.name,
        "exit_status": status,
        "truncation": prob.truncation,
        "qrr_sign_convention": prob.qrr_sign,
        "tasks": [
            {"index": r["index"], "task": r["task"], "status": r["status"], "file": report_filename(r),
             **({"count": r["count"], "failures": r["failures"]} if "count" in r else {"error": r["error"]})}
            for r in reports
        ],
    }
    return status, jsonable(summary), reports


def report_filename(r: dict) -> str:
    return f"{r['index']:02d}-{r['task']}.json"


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, sort_keys=True, ensure_ascii=True) + "\n"


def write_reports(out: Path, summary: dict, reports: list) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "summary.json").write_text(dumps(summary))
    for r in reports:
        (out / report_filename(r)).write_text(dumps(r))


def human_lines(summary: dict) -> list:
    lines = []
    for t in summary["tasks"]:
        if t["status"] == "error":
            e = t["error"]
            lines.append(f"ERROR [{t['index']}] {t['task']}: {e['cause']} at {e['field']}: {e['message']}")
        else:
            lines.append(f"{t['status'].upper()} [{t['index']}] {t['task']}: {t['count'] - t['failures']}/{t['count']} checks")
    lines.append(f"exit status {summary['exit_status']}")
    return lines


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="toricstack", description="Run toric stack computations and checks from a problem file.")
    p.add_argument("--input", required=True, metavar="PATH", help="problem file (JSON)")
    p.add_argument("--out", metavar="DIR", help="directory for summary.json and per-task reports")
    p.add_argument("--truncation", metavar="N", help="override the file's truncation (integer or p/q)")
    p.add_argument("--jobs", type=int, default=1, metavar="N", help="run tasks in N worker processes")
    p.add_argument("--qrr-sign", choices=CONVENTIONS, help="G-difference convention for check-qrr")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        T = parse_rational(args.truncation, "--truncation") if args.truncation is not None else None
        prob = load_problem(args.input, T, args.qrr_sign)
    except ParseError as exc:
        print(f"ERROR {exc.code}: {exc}", file=sys.stderr)
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            (out / "summary.json").write_text(dumps({
                "exit_status": EXIT_INPUT, "error": {"code": exc.code, "field": exc.field, "message": str(exc)}}))
        return EXIT_INPUT
    status, summary, reports = run(prob, max(1, args.jobs), T, args.qrr_sign)
    if args.out:
        write_reports(Path(args.out), summary, reports)
    for line in human_lines(summary):
        print(line)
    return status


if __name__ == "__main__":
    sys.exit(main())
