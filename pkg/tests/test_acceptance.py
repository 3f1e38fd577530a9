"""Acceptance criteria 1-8, one PASS/FAIL line each; all comparisons are exact."""
import json
import random
import time
from fractions import Fraction

import pytest

from toricstack import fixture_path, intlin
from toricstack.cli import main
from toricstack.degrees import congruence_holds, football_maps, pairings_hold
from toricstack.gfunc import check_g_identities, qrr_report
from toricstack.hirzebruch import compare_bundle_with_toric
from toricstack.ifunc import BundleData, IContext, check_C1, check_C2
from toricstack.stackyfan import StackyFan, check_sequences
from toricstack.symring import BaseAlgebra

from conftest import ACCEPTANCE_LINES, fan_of
from test_stackyfan import parallelepiped_points

FIXTURES = ["p1", "p121", "c2z2", "p1_ext", "f1_toric"]
LIMITS = {1: 5, 2: 5, 3: 10, 4: 30, 5: 120, 6: 120, 7: 30, 8: 5}


def record(n, title, ok, detail, elapsed):
    within = elapsed < LIMITS[n]
    status = "PASS" if ok and within else "FAIL"
    line = f"{status} criterion {n} ({title}): {detail}; {elapsed:.2f}s (limit {LIMITS[n]}s)"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line
    assert within, line


def random_ray_maps(count, seed=20261015):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        r = rng.randint(1, 3)
        n = rng.randint(r, 6)
        torsion = (rng.randint(2, 4),) if rng.random() < 0.3 else ()
        rays = [[rng.randint(-3, 3) for _ in range(r + len(torsion))] for _ in range(n)]
        if intlin.rank([row[:r] for row in rays]) < r:
            continue
        out.append(StackyFan.from_rays(rays, [[i] for i in range(n)], torsion=torsion, rank=r))
    return out


def merge_checks(reports):
    return [c for r in reports for c in r.checks]


def test_criterion_1_exact_sequences():
    t = time.perf_counter()
    fans = [fan_of(n) for n in ("p1", "p121", "c2z2")] + random_ray_maps(20)
    reps = [check_sequences(f) for f in fans]
    checks = merge_checks(reps)
    ok = all(r.passed for r in reps)
    record(1, "exact sequences", ok, f"{len(fans)} ray maps, {len(checks)} identities", time.perf_counter() - t)


def test_criterion_2_box_and_age():
    t = time.perf_counter()
    p121 = fan_of("p121")
    ages = sorted(b.age for b in p121.box())
    ok = len(p121.box()) == 2 and ages == [0, 1]
    c2z2 = fan_of("c2z2")
    extra = [b for b in c2z2.box() if not b.is_zero()]
    ok &= len(extra) == 1 and extra[0].fracs == (Fraction(1, 2), Fraction(1, 2)) and extra[0].age == 1
    cones = 0
    for name in FIXTURES:
        fan = fan_of(name)
        tors = 1
        for x in fan.group.torsion:
            tors *= x
        for sigma in fan.top_cones():
            pts = parallelepiped_points(fan.cone_matrix(sigma))
            ok &= len(fan.box_of_cone(sigma)) == len(pts) * tors
            cones += 1
    record(2, "box elements and ages", ok, f"P(1,2,1) ages {[str(a) for a in ages]}, {cones} cones against the parallelepiped oracle",
           time.perf_counter() - t)


def test_criterion_3_football_maps():
    t = time.perf_counter()
    total, ok = 0, True
    for name in FIXTURES:
        fan = fan_of(name)
        for pair in fan.adjacent_pairs():
            for b in fan.box_of_cone(pair.sigma):
                for fm in football_maps(fan, pair.sigma, pair.sigma_prime, b, 3):
                    ok &= congruence_holds(fan, fm) and pairings_hold(fan, fm)
                    total += 1
    ok &= total > 0
    record(3, "football maps", ok, f"{total} maps with c <= 3", time.perf_counter() - t)


def test_criterion_4_pole_inventory():
    t = time.perf_counter()
    reps = []
    for name in ("p1", "p121"):
        fan = fan_of(name)
        ctx = IContext(fan)
        for sigma in fan.top_cones():
            for b in fan.box_of_cone(sigma):
                reps.append(check_C1(ctx, sigma, b, 3))
    checks = merge_checks(reps)
    ok = all(r.passed for r in reps) and len(checks) > 0
    record(4, "(C1) pole inventory", ok, f"{len(checks)} coefficients, {sum(not c.passed for c in checks)} failures",
           time.perf_counter() - t)


def c2_reports(ctx):
    fan = ctx.fan
    reps = []
    for pair in fan.adjacent_pairs():
        for b in fan.box_of_cone(pair.sigma):
            for fm in football_maps(fan, pair.sigma, pair.sigma_prime, b, 3):
                reps.append(check_C2(ctx, pair.sigma, pair.sigma_prime, b, fm.c, 3))
    return reps


@pytest.fixture(scope="module")
def c2_runs():
    t = time.perf_counter()
    runs = {
        "P1": c2_reports(IContext(fan_of("p1"))),
        "P(1,2,1)": c2_reports(IContext(fan_of("p121"))),
        "P1-bundle a=(-1,0)": c2_reports(IContext(fan_of("p1"), BundleData(BaseAlgebra.projective(1), (-1, 0)))),
    }
    return runs, time.perf_counter() - t


def test_criterion_5_recursion(c2_runs):
    runs, elapsed = c2_runs
    ok = all(r.passed for reps in runs.values() for r in reps)
    half = any(r.info["c"].denominator == 2 for r in runs["P(1,2,1)"])
    twisted = any(any(r.info["b"]) for r in runs["P(1,2,1)"])
    h_parts = any("H" in c.lhs for r in runs["P1-bundle a=(-1,0)"] for c in r.checks)
    ok &= half and twisted and h_parts
    counts = ", ".join(f"{k}: {sum(len(r.checks) for r in v)}" for k, v in runs.items())
    record(5, "(C2) recursion", ok, f"{counts} residue identities; half-integer c {half}, H-linear residues {h_parts}", elapsed)


@pytest.mark.xfail(strict=True, reason="the transcribed closed-form Rec differs from the residue by a sign and by endpoint factors of fixed weights")
def test_criterion_5_closed_form_display(c2_runs):
    runs, elapsed = c2_runs
    held = [r.info["closed_form_holds"] for reps in runs.values() for r in reps]
    line = (f"{'PASS' if all(held) else 'FAIL'} criterion 5' (closed-form Rec with the displayed sign): "
            f"holds in {sum(held)}/{len(held)} (pair, sector, c) cases")
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert all(held), line


def test_criterion_6_hirzebruch_oracle():
    t = time.perf_counter()
    rep = compare_bundle_with_toric((-1, 0), 3)
    record(6, "bundle vs toric F1", rep.passed, f"{len(rep.checks)} coefficients, {len(rep.failures)} failures",
           time.perf_counter() - t)


def test_criterion_7_g_functions_and_qrr():
    t = time.perf_counter()
    reps = [check_g_identities(y, 4, 4, 8) for y in (Fraction(0), Fraction(1, 2), Fraction(1, 3))]
    half = Fraction(1, 2)
    qrr = qrr_report([(0, 0), (1, 0), (2, 0), (half, half), (3 * half, half)], 6, "both")
    ok = all(r.passed for r in reps) and qrr.passed and bool(qrr.info["holding"])
    record(7, "G-function identities and QRR factor", ok,
           f"{len(merge_checks(reps))} G-coefficients; QRR conventions {qrr.info['conventions']}, holding {qrr.info['holding']}",
           time.perf_counter() - t)


def test_criterion_8_cli_contract(tmp_path):
    t = time.perf_counter()
    expected = {"p1": 0, "c2z2": 0, "fail_invalid_fan": 1, "fail_bad_ray": 2, "fail_not_adjacent": 2}
    ok = True
    codes = {}
    for name, want in expected.items():
        outs = []
        for k in range(2):
            out = tmp_path / f"{name}-{k}"
            codes[name] = main(["--input", str(fixture_path(name)), "--out", str(out)])
            ok &= codes[name] == want
            outs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
        ok &= outs[0] == outs[1] and bool(outs[0])
    record(8, "determinism and exit codes", ok, f"exit codes {json.dumps(codes, sort_keys=True)}", time.perf_counter() - t)
