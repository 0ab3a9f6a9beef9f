"""Acceptance suite: one test and one printed PASS/FAIL line per criterion.

Run ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``;
the lines are printed even with output capture on.
"""

from __future__ import annotations

import random
import sys
import time
from fractions import Fraction as F

import pytest

from gyrolab import check_axioms, check_identities
from gyrolab.hm import (
    Ball,
    HMModel,
    HMNeighborhood,
    closedness_witness,
    discrete_metric,
    embed,
    embedding_trace,
    hm_oplus,
    hm_pseudometric,
    in_O,
    lift_function,
    lift_hom,
    path_disagreement,
    path_point,
    random_step_function,
)
from gyrolab.models import MobiusDisk, cayley_parse, cayley_search, cyclic, klein
from gyrolab.neighborhoods import (
    CONDITIONS,
    FAIL,
    PASS,
    check_condition,
    check_lifted_condition,
    dyadic_family,
    explicit_family,
    lattice_family,
    singleton_family,
)
from gyrolab import suites

FINITE = [cyclic(n) for n in range(2, 9)] + [klein()]
MOB = MobiusDisk()
N4 = 10_000
N3 = 1_000


def emit(label: str, ok: bool, detail: str = "") -> None:
    line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else "")
    capman = _capture_manager()
    if capman is not None:
        with capman.global_and_fixture_disabled():
            print("\n" + line, flush=True)
    else:
        print(line, flush=True)


_CONFIG = None


def _capture_manager():
    return _CONFIG.pluginmanager.getplugin("capturemanager") if _CONFIG is not None else None


@pytest.fixture(autouse=True)
def _grab_config(request):
    global _CONFIG
    _CONFIG = request.config
    yield


def test_axiom_suite():
    finite_ok = all(r.passed and r.exhaustive and r.max_residual == 0
                    for m in FINITE for r in check_axioms(m))
    mob = check_axioms(MOB, budget=N4, seed=0)
    worst = max(r.max_residual for r in mob)
    ok = finite_ok and all(r.passed for r in mob) and worst < 1e-9
    emit("axioms G1-G4: exhaustive on Z_2..Z_8 and Klein, Mobius 10^4 samples", ok,
         f"mobius max residual {worst:.2e}")
    assert ok


def test_identity_suite():
    finite_ok = all(r.passed and r.max_residual == 0 for m in FINITE for r in check_identities(m))
    mob = check_identities(MOB, budget=N4, seed=0)
    worst = max(r.max_residual for r in mob)
    ok = finite_ok and all(r.passed for r in mob) and worst < 1e-9
    emit("derived identities incl. coaddition decomposition: exact finite, Mobius < 1e-9", ok,
         f"{len(mob)} identities, mobius max residual {worst:.2e}")
    assert ok


def test_mobius_gyr_cross_check():
    rng = random.Random("gyr-cross-check")
    worst = 0.0
    for _ in range(N4):
        a, b, c = MOB.sample(rng), MOB.sample(rng), MOB.sample(rng)
        worst = max(worst, abs(MOB.gyr(a, b, c) - MOB.gyr_closed(a, b, c)))
    ok = worst < 1e-12
    emit("Mobius gyrator-identity gyr vs closed form within 1e-12 (10^4 samples)", ok, f"max {worst:.2e}")
    assert ok


def test_hm_is_gyrogroup():
    hm = HMModel(cyclic(4), max_breakpoints=6)
    reports = check_axioms(hm, budget=N3, seed=0) + check_identities(hm, budget=N3, seed=0)
    ok = all(r.passed and r.max_residual == 0 and r.samples == N3 for r in reports)
    emit("G^bullet over Z_4: full axiom+identity suite exact on 10^3 step functions", ok,
         f"{len(reports)} checks")
    assert ok


def test_embedding():
    ok = True
    for m in FINITE:
        d = discrete_metric(m)
        F_ = lambda x, n=m.order: F(x * x + 1, n * n + 1)
        for x in m.elements():
            ok &= lift_function(F_, embed(m, x)) == F_(x)
            for y in m.elements():
                ok &= hm_pseudometric(d, embed(m, x), embed(m, y)) == d(x, y)
    traces = 0
    for m in [cyclic(n) for n in range(2, 7)] + [klein()]:
        for V in lattice_family(m).members:
            lhs, rhs = embedding_trace(m, V)
            ok &= lhs == rhs
            traces += 1
    emit("embedding: d and F extend exactly (|G|<=8); trace identity over all V (|G|<=6)", ok,
         f"{traces} subsets")
    assert ok


def test_closedness():
    m = cyclic(5)
    rng = random.Random("closedness")
    done = 0
    ok = True
    while done < 100:
        f = random_step_function(m, rng)
        if f.is_constant:
            continue
        w = closedness_witness(f, singleton_family(m).members)
        ok &= w is not None and w.holds
        done += 1
    emit("closedness: witness excludes all constants from f + O(V, eps) for 100 f", ok)
    assert ok


def test_path():
    m = MOB
    rng = random.Random("path")
    grid = [F(k, 7) for k in range(8)]
    ok = True
    for _ in range(100):
        f = random_step_function(m, rng)
        ok &= path_point(f, 0) == embed(m, 0j) and path_point(f, 1) == f
        ok &= all(path_disagreement(f, s, t) <= abs(s - t) for s in grid for t in grid)
    emit("path: f_0 = e, f_1 = f, disagreement <= |s-t| on an 8-point grid (100 f)", ok)
    assert ok


def test_O_two_is_everything():
    rng = random.Random("O2")
    cases = [(cyclic(4), lattice_family(cyclic(4)).members),
             (klein(), lattice_family(klein()).members),
             (MOB, dyadic_family().members)]
    ok = True
    count = 0
    for m, hoods in cases:
        for _ in range(N3):
            f = random_step_function(m, rng)
            ok &= all(in_O(f, HMNeighborhood(U, 2)) for U in hoods)
            count += 1
    emit("O(U, 2) contains every sampled step function for every tested U", ok, f"{count} f")
    assert ok


def test_hm_metric():
    rows = suites.metric(cyclic(5), N4, 0, 0.0) + suites.metric(MOB, N4, 0, 1e-12)
    ok = all(r.passed for r in rows)
    tri = max(r.residual for r in rows if r.check == "triangle")
    emit("d^bullet symmetry and triangle on 10^4 triples (exact discrete, Mobius 1e-12)", ok,
         f"worst triangle excess {tri:.1e}")
    assert ok


def test_homomorphism_lifting():
    z4, z2 = cyclic(4), cyclic(2)
    phi = lambda x: x % 2
    rng = random.Random("hom")
    ok = True
    for _ in range(N3):
        f, g = random_step_function(z4, rng), random_step_function(z4, rng)
        lhs = lift_hom(phi, hm_oplus(f, g), z2, validate=False)
        rhs = hm_oplus(lift_hom(phi, f, z2, validate=False), lift_hom(phi, g, z2, validate=False))
        ok &= lhs == rhs
    emit("homomorphism lifting Z_4 -> Z_2 preserves + exactly (10^3 pairs)", ok)
    assert ok


def test_neighbourhood_conditions():
    details = []
    finite_ok = all(check_condition(m, singleton_family(m), c).status == PASS
                    for m in FINITE for c in CONDITIONS)
    details.append(f"singleton {'ok' if finite_ok else 'FAIL'}")
    mob = [check_condition(MOB, dyadic_family(), c, budget=N3, seed=0) for c in CONDITIONS]
    mob_ok = all(r.status == PASS and r.counterexample is None for r in mob)
    details.append(f"dyadic {sum(r.passed for r in mob)}/9")
    lifted_ok = True
    for m, inner in ((cyclic(4), lattice_family(cyclic(4))), (klein(), singleton_family(klein()))):
        reps = [check_lifted_condition(m, inner, c, budget=N3, seed=0) for c in CONDITIONS]
        lifted_ok &= all(r.status == PASS and r.checks == N3 for r in reps)
    details.append(f"lifted {'ok' if lifted_ok else 'FAIL'}")
    ok = finite_ok and mob_ok and lifted_ok
    emit("neighbourhood-base conditions 1-9: singleton, dyadic balls, lifted base", ok, ", ".join(details))
    assert ok


def test_search():
    r2 = cayley_search(2)
    r3 = cayley_search(3)
    ok = len(r2.found) == 1 and r2.found[0].table == cyclic(2).table
    ok &= cyclic(3).table in [g.table for g in r3.found]
    t0 = time.perf_counter()
    r5 = cayley_search(5)
    elapsed = time.perf_counter() - t0
    for r in (r2, r3, cayley_search(4), r5):
        ok &= all(rep.passed for g in r.found for rep in check_axioms(g))
    ok &= elapsed < 60
    emit("search: order 2 is Z_2 only, Z_3 found, all tables <= 5 pass axioms, order 5 < 60 s", ok,
         f"order 5 in {elapsed:.2f}s, {len(r5.found)} tables")
    assert ok


def test_negative_control():
    m = cayley_parse("4\n0 1 2 3\n1 3 2 0\n2 3 0 1\n3 0 1 2\n")
    bad = [r for r in check_axioms(m) if not r.passed]
    witness_ok = bool(bad) and all(r.failures and r.failures[0].inputs for r in bad)
    broken = check_condition(MOB, explicit_family([Ball(0.5)]), 1, budget=N3)
    ok = witness_ok and broken.status == FAIL and broken.counterexample is not None
    emit("negative control: mutated Z_4 rejected with witness; broken family reports fail", ok,
         f"{', '.join(r.identity for r in bad)}; family status {broken.status}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
