import json
from fractions import Fraction as F

import pytest

from gyrolab.hm import Ball, HMNeighborhood, Subset, embed, in_O
from gyrolab.models import MobiusDisk, cayley_parse, cyclic, klein
from gyrolab.neighborhoods import (
    CONDITIONS,
    EXHAUSTED,
    FAIL,
    PASS,
    FamilyError,
    check_all,
    check_condition,
    check_lifted_condition,
    containment,
    dyadic_family,
    explicit_family,
    family_from_json,
    find_witness,
    lattice_family,
    lifted_epsilons,
    lifted_family,
    replay,
    separating_neighborhood,
    singleton_family,
)

MOB = MobiusDisk()


@pytest.mark.parametrize("model", [cyclic(2), cyclic(5), cyclic(8), klein()], ids=lambda m: m.name)
def test_singleton_family_passes_everything(model):
    for r in check_all(model, singleton_family(model)):
        assert r.status == PASS and not r.sampled
        assert r.witness == {"kind": "subset", "params": {"elements": [0]}}


@pytest.mark.parametrize("model", [cyclic(4), cyclic(6), klein()], ids=lambda m: m.name)
def test_lattice_family_passes_everything(model):
    assert all(r.passed for r in check_all(model, lattice_family(model)))


def test_lattice_enumeration():
    fam = lattice_family(cyclic(4))
    sizes = [len(W) for W in fam.members]
    assert sizes == sorted(sizes, reverse=True) and len(sizes) == 8
    assert all(W.contains(0) for W in fam.members)
    assert lattice_family(cyclic(4)).members == fam.members
    with pytest.raises(FamilyError):
        lattice_family(MOB)


def test_condition7_matches_cosubtraction_on_lattice():
    for m in (cyclic(6), klein(), cyclic(5)):
        fam = lattice_family(m)
        for x in m.elements():
            if x == m.identity:
                continue
            j = separating_neighborhood(m, fam, x)
            U = fam.members[j]
            assert not (set(m.oplus(x, u) for u in U.members()) & set(U.members()))
            assert x not in {m.cominus(u, v) for u in U.members() for v in U.members()}


def test_mobius_condition1_witness_example():
    fam = dyadic_family()
    j, _, _, sampled = find_witness(MOB, fam, [containment(MOB, 1, U=Ball(0.5))], 1000, "ex")
    assert fam.members[j] == Ball(0.25) and sampled


def test_mobius_condition7_example():
    fam = dyadic_family()
    j = separating_neighborhood(MOB, fam, 0.5 + 0j)
    assert j is not None and fam.members[j].radius <= 0.25


def test_dyadic_family_shape():
    fam = dyadic_family()
    radii = [W.radius for W in fam.members]
    assert radii == sorted(radii, reverse=True) and radii[0] == 0.5 and len(radii) == 24
    assert fam.truncated and list(fam.outer) == list(range(12))
    with pytest.raises(FamilyError):
        dyadic_family().validate(cyclic(3))


@pytest.mark.parametrize("cond", CONDITIONS)
def test_mobius_dyadic_conditions(cond):
    r = check_condition(MOB, dyadic_family(), cond, budget=200, outer=30)
    assert r.status == PASS and r.sampled and r.counterexample is None


def test_broken_family_fails_not_exhausted():
    r = check_condition(MOB, explicit_family([Ball(0.5)]), 1, budget=300)
    assert r.status == FAIL
    cx = r.counterexample
    a, b = (complex(*p) for p in cx["points"])
    assert abs(MOB.oplus(a, b)) >= 0.5
    # finite version: {0, 1} in ℤ_4 is not closed under ⊕ and nothing smaller exists
    z4 = cyclic(4)
    r = check_condition(z4, explicit_family([Subset({0, 1})]), 1)
    assert r.status == FAIL and r.counterexample["image"] == 2


def test_finite_separation_failure():
    z4 = cyclic(4)
    r = check_condition(z4, explicit_family([Subset({0, 1, 2, 3})]), 7)
    assert r.status == FAIL


def test_family_must_contain_identity():
    with pytest.raises(FamilyError):
        check_condition(cyclic(3), explicit_family([Subset({1})]), 1)


def test_truncated_family_reports_exhaustion():
    # only huge balls: ball(1/2) ⊕ ball(1/2) escapes ball(1/2), and the cut
    # family has nothing smaller, so the search runs dry
    fam = dyadic_family(depth=1, outer_depth=1)
    r = check_condition(MOB, fam, 1, budget=300)
    assert r.status == EXHAUSTED


def test_family_json_round_trip():
    for m, fam in ((cyclic(4), lattice_family(cyclic(4))), (cyclic(4), singleton_family(cyclic(4))),
                   (MOB, dyadic_family(10, 5)), (MOB, explicit_family([Ball(0.5), Ball(0.1)]))):
        back = family_from_json(json.loads(json.dumps(fam.to_json())), m)
        assert back.members == fam.members and back.outer == fam.outer


def test_lifted_family_and_epsilons():
    eps = lifted_epsilons()
    assert eps[0] == 2 and eps[-1] == F(1, 1024) and len(eps) == 11
    fam = lifted_family(singleton_family(cyclic(3)), depth=3)
    assert len(fam.members) == 4
    e = embed(cyclic(3), 0)
    assert all(W.contains(e) for W in fam.members)


def test_lifted_conditions_finite():
    z4 = cyclic(4)
    for inner in (singleton_family(z4), lattice_family(z4)):
        for cond in CONDITIONS:
            r = check_lifted_condition(z4, inner, cond, budget=150)
            assert r.status == PASS, (cond, r.counterexample)


def test_lifted_condition1_example():
    # U, eps = 1/2 with the witness O(V, 1/4)
    z4 = cyclic(4)
    r = check_lifted_condition(z4, lattice_family(z4), 1, budget=300)
    assert r.passed
    half = [inst for inst in r.instances if inst["epsilon"] == "1/4"]
    assert half


def test_lifted_mobius_smoke():
    r = check_lifted_condition(MOB, dyadic_family(), 9, budget=100)
    assert r.status == PASS
    r = check_lifted_condition(MOB, dyadic_family(), 1, budget=100)
    assert r.status == PASS


def test_O2_is_everything():
    m = cyclic(5)
    from gyrolab.hm import random_step_function
    import random

    rng = random.Random(0)
    for _ in range(100):
        assert in_O(random_step_function(m, rng), HMNeighborhood(Subset({0}), 2))


def test_replay_base_reports():
    for model, fam, cond in ((MOB, dyadic_family(), 3), (cyclic(5), lattice_family(cyclic(5)), 5),
                             (MOB, explicit_family([Ball(0.5)]), 1)):
        r = check_condition(model, fam, cond, budget=100, outer=10)
        ok, _ = replay(json.loads(json.dumps(r.to_json())))
        assert ok


def test_replay_detects_tampering():
    r = check_condition(cyclic(4), lattice_family(cyclic(4)), 1)
    js = json.loads(json.dumps(r.to_json()))
    # claim {0,1} works for U = {0,1}
    target = next(k for k, W in enumerate(lattice_family(cyclic(4)).members) if W == Subset({0, 1}))
    for inst in js["instances"]:
        if inst["outer"]["U"] == target:
            inst["witness"] = target
    ok, _ = replay(js)
    assert not ok


def test_replay_lifted():
    r = check_lifted_condition(klein(), singleton_family(klein()), 4, budget=40)
    js = json.loads(json.dumps(r.to_json()))
    assert replay(js)[0]
    js["instances"][0]["epsilon"] = "1/3"
    assert not replay(js)[0]


def test_reports_deterministic():
    a = check_condition(MOB, dyadic_family(), 6, budget=100, outer=10, seed=3).to_json()
    b = check_condition(MOB, dyadic_family(), 6, budget=100, outer=10, seed=3).to_json()
    assert json.dumps(a) == json.dumps(b)


def test_bad_condition_id():
    with pytest.raises(ValueError):
        check_condition(cyclic(3), singleton_family(cyclic(3)), 10)


def test_mutated_table_lattice_conditions_still_decidable():
    # structural validity is enough to run the checks even when the axioms fail
    m = cayley_parse("4\n0 1 2 3\n1 3 2 0\n2 3 0 1\n3 0 1 2\n")
    reports = check_all(m, singleton_family(m))
    assert all(r.status in (PASS, FAIL) for r in reports)
