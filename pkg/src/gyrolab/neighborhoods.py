"""Witness search for the nine neighbourhood-base conditions, on a base
family of identity neighbourhoods and on the lifted family {O(U, eps)}.

Every ∃-witness is searched largest-first through the family enumeration and
the first candidate whose containment survives verification is reported.
Containments are checked exhaustively when the carrier and the candidate are
finite; otherwise they are checked on seeded samples and the report says so.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from gyrolab.core import GyroModel, coplus_solve
from gyrolab.hm import (
    Ball,
    HMModel,
    HMNeighborhood,
    Neighborhood,
    Subset,
    hm_ominus,
    hm_oplus,
    in_O,
    neighborhood_from_json,
    random_step_function,
    refine,
    sample_in_O,
    violation_measure,
)
from gyrolab.rational import format_rational

PASS = "pass"
FAIL = "fail"
EXHAUSTED = "exhausted-budget"

CONDITIONS = tuple(range(1, 10))
MAX_LATTICE_ORDER = 12
DEFAULT_OUTER = 100


class FamilyError(ValueError):
    """Family incompatible with the model, or malformed configuration."""


@dataclass
class BaseFamily:
    """A finite enumeration of identity neighbourhoods, largest first.

    ``truncated`` marks a finite cut of an infinite family (running out of
    candidates is then inconclusive).  ∀U quantifiers range over the first
    ``outer_depth`` members so the ∃-search keeps headroom below every U.
    """

    kind: str
    members: tuple[Neighborhood, ...]
    params: dict = field(default_factory=dict)
    truncated: bool = False
    outer_depth: int | None = None

    @property
    def outer(self) -> range:
        n = len(self.members) if self.outer_depth is None else min(self.outer_depth, len(self.members))
        return range(n)

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": self.params}

    def validate(self, model: GyroModel) -> None:
        if not self.members:
            raise FamilyError("empty family")
        e = model.identity
        for W in self.members:
            if isinstance(W, Subset) and not model.is_finite:
                raise FamilyError("subset neighbourhoods need a finite carrier")
            if isinstance(W, Ball) and model.is_finite:
                raise FamilyError("metric balls need a continuous model")
            if isinstance(W, Subset) and not all(model.contains(x) for x in W.elements):
                raise FamilyError(f"{W!r} is not a subset of {model.name}")
            if not W.contains(e):
                raise FamilyError(f"{W!r} does not contain the identity")


def lattice_family(model: GyroModel) -> BaseFamily:
    """Every subset containing the identity, by decreasing size."""
    elements = model.elements()
    if elements is None or len(elements) > MAX_LATTICE_ORDER:
        raise FamilyError(f"lattice family needs a finite carrier of order <= {MAX_LATTICE_ORDER}")
    e = model.identity
    rest = [x for x in elements if x != e]
    subsets = []
    for k in range(len(rest), -1, -1):
        for combo in itertools.combinations(rest, k):
            subsets.append(Subset(frozenset((e, *combo))))
    return BaseFamily("finite-lattice", tuple(subsets))


def singleton_family(model: GyroModel) -> BaseFamily:
    return BaseFamily("singleton", (Subset(frozenset([model.identity])),))


def dyadic_family(depth: int = 24, outer_depth: int = 12) -> BaseFamily:
    """Balls of radius 2^-k, k = 1..depth."""
    if depth < 1:
        raise FamilyError("depth must be >= 1")
    balls = tuple(Ball(2.0 ** -k) for k in range(1, depth + 1))
    return BaseFamily("dyadic-balls", balls, {"depth": depth, "outer_depth": outer_depth},
                      truncated=True, outer_depth=outer_depth)


def explicit_family(members: Sequence[Neighborhood]) -> BaseFamily:
    members = tuple(members)
    return BaseFamily("explicit", members, {"members": [W.to_json() for W in members]})


def lifted_epsilons(depth: int = 10) -> tuple[Fraction, ...]:
    """{2} ∪ {2^-k : 1 <= k <= depth}, decreasing."""
    return (Fraction(2), *(Fraction(1, 2 ** k) for k in range(1, depth + 1)))


def lifted_family(inner: BaseFamily, depth: int = 10) -> BaseFamily:
    members = tuple(HMNeighborhood(U, eps) for eps in lifted_epsilons(depth) for U in inner.members)
    return BaseFamily("lifted", members, {"inner": inner.to_json(), "depth": depth}, truncated=True)


def family_from_json(obj: dict, model: GyroModel) -> BaseFamily:
    kind = obj.get("kind")
    params = obj.get("params", {})
    if kind in ("finite-lattice", "lattice"):
        return lattice_family(model)
    if kind == "singleton":
        return singleton_family(model)
    if kind in ("dyadic-balls", "dyadic"):
        return dyadic_family(int(params.get("depth", 24)), int(params.get("outer_depth", 12)))
    if kind == "explicit":
        return explicit_family([neighborhood_from_json(m) for m in params["members"]])
    if kind == "lifted":
        base = model.base if isinstance(model, HMModel) else model
        return lifted_family(family_from_json(params["inner"], base), int(params.get("depth", 10)))
    raise FamilyError(f"unknown family kind {kind!r}")


def default_family(model: GyroModel, kind: str | None = None) -> BaseFamily:
    if kind is None:
        kind = "singleton" if model.is_finite else "dyadic"
    return family_from_json({"kind": kind}, model)


@dataclass
class ConditionReport:
    suite: str
    condition: int
    status: str
    sampled: bool
    checks: int = 0
    witness: dict | None = None
    counterexample: dict | None = None
    instances: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "condition": self.condition,
            "status": self.status,
            "sampled": self.sampled,
            "checks": self.checks,
            "witness": self.witness,
            "counterexample": self.counterexample,
            "instances": self.instances,
            "config": self.config,
        }


# containment predicates: pred(W, *points) returns None or the offending image

Pred = tuple[int, Callable[..., Any]]


def _outside(U: Neighborhood, y):
    return None if U.contains(y) else y


def containment(model: GyroModel, cond: int, U=None, V=None, x=None, a=None, b=None) -> Pred:
    """The containment a witness W must satisfy for one instance of a
    condition, as (arity, pred).  ``cond=0`` encodes W ⊟ W ⊆ U."""
    m = model
    if cond == 1:
        return 2, lambda W, v, w: _outside(U, m.oplus(v, w))
    if cond == 2:
        return 1, lambda W, v: _outside(U, m.oplus(x, v))
    if cond == 3:
        nx = m.ominus(x)
        return 1, lambda W, v: _outside(U, m.oplus(nx, m.oplus(v, x)))
    if cond == 4:
        return 1, lambda W, w: None if U.contains(w) and V.contains(w) else w
    if cond == 5:
        return 1, lambda W, v: _outside(U, m.gyr(a, b, v))
    if cond == 6:
        return 2, lambda W, v, w: _outside(U, m.gyr(v, b, w))
    if cond == 7:
        # x ∉ W ⊟ W  <=>  (x ⊕ W) ∩ W = ∅
        def sep(W, u):
            y = m.oplus(x, u)
            return y if W.contains(y) else None
        return 1, sep
    if cond == 8:
        nx = m.ominus(x)

        def both(W, v):
            y = m.oplus(nx, m.coplus(v, x))
            if not U.contains(y):
                return y
            return _outside(U, coplus_solve(m, x, m.oplus(x, v)))
        return 1, both
    if cond == 9:
        return 1, lambda W, v: _outside(U, m.ominus(v))
    if cond == 0:
        # V ⊟ V ⊆ U, used by the lifted separation argument
        return 2, lambda W, v, w: _outside(U, m.cominus(v, w))
    raise ValueError(f"unknown condition {cond}")


def _points(model: GyroModel, W: Neighborhood, arity: int, budget: int, rng: random.Random):
    members = W.members()
    if members is not None and model.is_finite:
        return itertools.product(members, repeat=arity), False
    return (tuple(W.sample(model, rng) for _ in range(arity)) for _ in range(budget)), True


def verify(model: GyroModel, W: Neighborhood, preds: Sequence[Pred], budget: int,
           key: str) -> tuple[dict | None, int, bool]:
    """Check every predicate on points of W.  Returns (counterexample,
    points checked, sampled?)."""
    checks = 0
    sampled = False
    for k, (arity, fn) in enumerate(preds):
        rng = random.Random(f"{key}:{k}")
        pts, smp = _points(model, W, arity, budget, rng)
        sampled |= smp
        for p in pts:
            checks += 1
            bad = fn(W, *p)
            if bad is not None:
                return {"points": list(p), "image": bad, "predicate": k}, checks, sampled
    return None, checks, sampled


def find_witness(model: GyroModel, family: BaseFamily, preds: Sequence[Pred], budget: int,
                 key: str) -> tuple[int | None, dict | None, int, bool]:
    """Largest-first search; returns (index, last counterexample, checks, sampled)."""
    checks = 0
    sampled = False
    last = None
    for j, W in enumerate(family.members):
        cex, n, smp = verify(model, W, preds, budget, f"{key}:{j}")
        checks += n
        sampled |= smp
        if cex is None:
            return j, None, checks, sampled
        last = {**cex, "candidate": j}
    return None, last, checks, sampled


def _instances(model: GyroModel, family: BaseFamily, cond: int, outer: int, rng: random.Random):
    Us = family.outer
    elements = model.elements()
    if elements is not None:
        e = model.identity
        if cond in (1, 9):
            return [{"U": i} for i in Us]
        if cond == 2:
            return [{"U": i, "x": x} for i in Us for x in elements if family.members[i].contains(x)]
        if cond in (3, 8):
            return [{"U": i, "x": x} for i in Us for x in elements]
        if cond == 4:
            return [{"U": i, "V": j} for i in Us for j in Us]
        if cond == 5:
            return [{"U": i, "a": a, "b": b} for i in Us for a in elements for b in elements]
        if cond == 6:
            return [{"U": i, "b": b} for i in Us for b in elements]
        if cond == 7:
            return [{"x": x} for x in elements if x != e]
    else:
        Us = list(Us)
        if cond in (1, 9):
            return [{"U": i} for i in Us]
        if cond == 4:
            return [{"U": i, "V": j} for i in Us for j in Us]
        out = []
        for n in range(outer):
            i = Us[n % len(Us)]
            U = family.members[i]
            if cond == 2:
                out.append({"U": i, "x": U.sample(model, rng)})
            elif cond in (3, 8):
                out.append({"U": i, "x": model.sample(rng)})
            elif cond == 5:
                out.append({"U": i, "a": model.sample(rng), "b": model.sample(rng)})
            elif cond == 6:
                out.append({"U": i, "b": model.sample(rng)})
            elif cond == 7:
                x = model.sample(rng)
                while model.eq(x, model.identity):
                    x = model.sample(rng)
                out.append({"x": x})
        return out
    raise ValueError(f"unknown condition {cond}")


def _instance_containment(model, family, cond, inst) -> Pred:
    kw = {k: v for k, v in inst.items() if k not in ("U", "V")}
    if "U" in inst:
        kw["U"] = family.members[inst["U"]]
    if "V" in inst:
        kw["V"] = family.members[inst["V"]]
    return containment(model, cond, **kw)


def _encode_inst(model, inst) -> dict:
    return {k: (v if k in ("U", "V") else model.encode(v)) for k, v in inst.items()}


def _decode_inst(model, obj) -> dict:
    return {k: (v if k in ("U", "V") else model.decode(v)) for k, v in obj.items()}


def _encode_cex(model, family, cex, inst) -> dict:
    return {
        "instance": _encode_inst(model, inst),
        "candidate": family.members[cex["candidate"]].to_json(),
        "points": [model.encode(p) for p in cex["points"]],
        "image": model.encode(cex["image"]),
    }


def check_condition(model: GyroModel, family: BaseFamily, cond: int, budget: int = 1000,
                    seed: int = 0, outer: int | None = None) -> ConditionReport:
    """Decide one condition for (model, family).

    ∀-variables range over the whole carrier and family when they are finite;
    on continuous models ``outer`` instances (default min(budget, 100)) are drawn.
    Each containment is verified exhaustively or on ``budget`` samples.
    """
    if cond not in CONDITIONS:
        raise ValueError(f"condition must be in 1..9, got {cond}")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    family.validate(model)
    rng = random.Random(f"{seed}:outer:{cond}")
    insts = _instances(model, family, cond, min(budget, DEFAULT_OUTER) if outer is None else outer, rng)
    config = {"model": model.describe(), "family": family.to_json(), "budget": budget,
              "seed": seed, "outer": outer}
    report = ConditionReport("base", cond, PASS, sampled=not model.is_finite, config=config)
    exhausted = False
    for n, inst in enumerate(insts):
        pred = _instance_containment(model, family, cond, inst)
        j, cex, checks, sampled = find_witness(model, family, [pred], budget, f"{seed}:{cond}:{n}")
        report.checks += checks
        report.sampled |= sampled
        if j is None:
            if family.truncated and not model.is_finite:
                exhausted = True
                report.instances.append({"outer": _encode_inst(model, inst), "witness": None})
                if report.counterexample is None:
                    report.counterexample = _encode_cex(model, family, cex, inst)
                continue
            report.status = FAIL
            report.counterexample = _encode_cex(model, family, cex, inst)
            report.instances.append({"outer": _encode_inst(model, inst), "witness": None})
            return report
        report.instances.append({"outer": _encode_inst(model, inst), "witness": j})
        if report.witness is None:
            report.witness = family.members[j].to_json()
    if exhausted:
        report.status = EXHAUSTED
    else:
        report.counterexample = None
    return report


def check_all(model: GyroModel, family: BaseFamily, budget: int = 1000, seed: int = 0,
              outer: int | None = None) -> list[ConditionReport]:
    return [check_condition(model, family, c, budget, seed, outer) for c in CONDITIONS]


def separating_neighborhood(model: GyroModel, family: BaseFamily, x, budget: int = 1000,
                            seed: int = 0) -> int | None:
    """Index of the first member U with (x ⊕ U) ∩ U = ∅, i.e. x ∉ U ⊟ U."""
    j, _, _, _ = find_witness(model, family, [containment(model, 7, x=x)], budget, f"{seed}:sep")
    return j


# lifted base {O(U, eps)}


class _WitnessCache:
    def __init__(self, model, inner, budget):
        self.model, self.inner, self.budget = model, inner, budget
        self.memo: dict = {}
        self.cacheable = model.is_finite

    def find(self, key, preds, rngkey):
        if self.cacheable and key in self.memo:
            return self.memo[key]
        j, _, checks, _ = find_witness(self.model, self.inner, preds, self.budget, rngkey)
        if self.cacheable:
            self.memo[key] = j
        return j


def _lifted_sample(cond, model, hm, inner, eps_values, cache, rng, rngkey):
    """One sampled instance of the lifted condition.  Returns
    (status, witness description, counterexample)."""
    Us = list(inner.outer)
    i = rng.choice(Us)
    U = inner.members[i]
    eps = rng.choice(eps_values)
    e = model.identity
    O = HMNeighborhood
    sample = lambda V, d: sample_in_O(model, V, d, rng)

    def wit(key, preds):
        return cache.find((cond, i, key), preds, f"{rngkey}:w")

    def res(ok, V, d, cex):
        desc = {"U": i, "V": V, "epsilon": format_rational(d)}
        if ok:
            return PASS, desc, None
        return FAIL, desc, {k: (v.to_json() if hasattr(v, "to_json") else v) for k, v in cex.items()}

    if cond == 1:
        j = wit((), [containment(model, 1, U=U)])
        if j is None:
            return None, {"U": i}, None
        V = inner.members[j]
        f, g = sample(V, eps / 2), sample(V, eps / 2)
        t = hm_oplus(f, g)
        return res(in_O(t, O(U, eps)), j, eps / 2, {"f": f, "g": g, "image": t})
    if cond == 2:
        f = sample(U, eps)
        L = sorted({v for v in f.values if U.contains(v)}, key=repr)
        j = wit(tuple(L), [containment(model, 2, U=U, x=x) for x in L])
        if j is None:
            return None, {"U": i}, None
        V = inner.members[j]
        delta = eps - violation_measure(f, U)
        g = sample(V, delta)
        t = hm_oplus(f, g)
        return res(in_O(t, O(U, eps)), j, delta, {"f": f, "g": g, "image": t})
    if cond == 3:
        f = random_step_function(model, rng)
        xs = sorted(set(f.values), key=repr)
        j = wit(tuple(xs), [containment(model, 3, U=U, x=x) for x in xs])
        if j is None:
            return None, {"U": i}, None
        g = sample(inner.members[j], eps)
        t = hm_oplus(hm_ominus(f), hm_oplus(g, f))
        return res(in_O(t, O(U, eps)), j, eps, {"f": f, "g": g, "image": t})
    if cond == 4:
        i2 = rng.choice(Us)
        U2 = inner.members[i2]
        delta = rng.choice(eps_values)
        j = cache.find((4, i, i2), [containment(model, 4, U=U, V=U2)], f"{rngkey}:w")
        if j is None:
            return None, {"U": i}, None
        d0 = min(eps, delta)
        h = sample(inner.members[j], d0)
        ok = in_O(h, O(U, eps)) and in_O(h, O(U2, delta))
        return res(ok, j, d0, {"h": h})
    if cond == 5:
        f, g = random_step_function(model, rng), random_step_function(model, rng)
        _, (fv, gv) = refine(f, g)
        pairs = sorted(set(zip(fv, gv)), key=repr)
        j = wit(tuple(pairs), [containment(model, 5, U=U, a=a, b=b) for a, b in pairs])
        if j is None:
            return None, {"U": i}, None
        h = sample(inner.members[j], eps)
        t = hm.gyr(f, g, h)
        return res(in_O(t, O(U, eps)), j, eps, {"f": f, "g": g, "h": h, "image": t})
    if cond == 6:
        f = random_step_function(model, rng)
        xs = sorted(set(f.values), key=repr)
        j = wit(tuple(xs), [containment(model, 6, U=U, b=x) for x in xs])
        if j is None:
            return None, {"U": i}, None
        V = inner.members[j]
        h, h2 = sample(V, eps / 2), sample(V, eps / 2)
        t = hm.gyr(h2, f, h)
        return res(in_O(t, O(U, eps)), j, eps / 2, {"f": f, "h": h, "h2": h2, "image": t})
    if cond == 7:
        f = random_step_function(model, rng)
        while all(model.eq(v, e) for v in f.values):
            f = random_step_function(model, rng)
        a, b, x = next(p for p in f.pieces() if not model.eq(p[2], e))
        k = next((k for k, W in enumerate(inner.members) if not W.contains(x)), None)
        if k is None:
            return None, {"U": None}, None
        Uk = inner.members[k]
        j = cache.find((7, k), [containment(model, 0, U=Uk)], f"{rngkey}:w")
        if j is None:
            return None, {"U": k}, None
        width = b - a
        V = inner.members[j]
        h1, h2 = sample(V, width / 2), sample(V, width / 2)
        t = hm.cominus(h1, h2)
        ok = not in_O(f, O(Uk, width)) and in_O(t, O(Uk, width))
        status, desc, cex = res(ok, j, width / 2, {"f": f, "h1": h1, "h2": h2, "image": t})
        desc["U"] = k
        return status, desc, cex
    if cond == 8:
        f = random_step_function(model, rng)
        xs = sorted(set(f.values), key=repr)
        j = wit(tuple(xs), [containment(model, 8, U=U, x=x) for x in xs])
        if j is None:
            return None, {"U": i}, None
        h = sample(inner.members[j], eps)
        t1 = hm_oplus(hm_ominus(f), hm.coplus(h, f))
        t2 = coplus_solve(hm, f, hm_oplus(f, h))
        ok = in_O(t1, O(U, eps)) and in_O(t2, O(U, eps))
        return res(ok, j, eps, {"f": f, "h": h, "image": t1, "image2": t2})
    if cond == 9:
        j = wit((), [containment(model, 9, U=U)])
        if j is None:
            return None, {"U": i}, None
        h = sample(inner.members[j], eps)
        t = hm_ominus(h)
        return res(in_O(t, O(U, eps)), j, eps, {"h": h, "image": t})
    raise ValueError(f"unknown condition {cond}")


def check_lifted_condition(model: GyroModel, inner: BaseFamily, cond: int, budget: int = 1000,
                           seed: int = 0, depth: int = 10, inner_budget: int = 256) -> ConditionReport:
    """Instantiate the explicit witness for O(U, eps) built from base-level
    witnesses and check it on ``budget`` sampled step functions."""
    if cond not in CONDITIONS:
        raise ValueError(f"condition must be in 1..9, got {cond}")
    inner.validate(model)
    hm = HMModel(model)
    eps_values = lifted_epsilons(depth)
    cache = _WitnessCache(model, inner, inner_budget)
    config = {"model": model.describe(), "family": inner.to_json(), "budget": budget, "seed": seed,
              "depth": depth, "inner_budget": inner_budget}
    report = ConditionReport("lifted", cond, PASS, sampled=True, config=config)
    exhausted = False
    for n in range(budget):
        rngkey = f"{seed}:lifted:{cond}:{n}"
        status, desc, cex = _lifted_sample(cond, model, hm, inner, eps_values, cache,
                                           random.Random(rngkey), rngkey)
        report.checks += 1
        if status is None:
            if inner.truncated:
                exhausted = True
                continue
            report.status = FAIL
            report.counterexample = {"sample": n, "reason": "no base-level witness", **desc}
            return report
        report.instances.append(desc)
        if report.witness is None:
            report.witness = {**desc, "V": inner.members[desc["V"]].to_json()}
        if status == FAIL:
            report.status = FAIL
            report.counterexample = {"sample": n, **cex}
            return report
    if exhausted:
        report.status = EXHAUSTED
    return report


def check_lifted_base(model: GyroModel, inner: BaseFamily, budget: int = 1000, seed: int = 0,
                      depth: int = 10, inner_budget: int = 256) -> list[ConditionReport]:
    return [check_lifted_condition(model, inner, c, budget, seed, depth, inner_budget)
            for c in CONDITIONS]


# replay


def replay(report: dict) -> tuple[bool, str]:
    """Re-verify a serialized report.  Base-suite witnesses are re-checked
    one by one with their recorded sampling keys; lifted reports are
    regenerated from their configuration and compared."""
    from gyrolab.registry import model_from_json

    cfg = report["config"]
    model = model_from_json(cfg["model"])
    cond = report["condition"]
    if report["suite"] == "lifted":
        family = family_from_json(cfg["family"], model)
        again = check_lifted_condition(model, family, cond, cfg["budget"], cfg["seed"],
                                       cfg.get("depth", 10), cfg.get("inner_budget", 256))
        same = again.to_json() == report
        return same, "regenerated report matches" if same else "regenerated report differs"
    family = family_from_json(cfg["family"], model)
    budget, seed = cfg["budget"], cfg["seed"]
    for n, rec in enumerate(report["instances"]):
        inst = _decode_inst(model, rec["outer"])
        j = rec["witness"]
        if j is None:
            continue
        pred = _instance_containment(model, family, cond, inst)
        cex, _, _ = verify(model, family.members[j], [pred], budget, f"{seed}:{cond}:{n}:{j}")
        if cex is not None:
            return False, f"condition {cond}: witness {j} for instance {n} no longer verifies"
    if report["status"] == FAIL:
        cx = report["counterexample"]
        inst = _decode_inst(model, cx["instance"])
        pred = _instance_containment(model, family, cond, inst)
        W = neighborhood_from_json(cx["candidate"])
        pts = [model.decode(p) for p in cx["points"]]
        if pred[1](W, *pts) is None:
            return False, f"condition {cond}: recorded counterexample does not reproduce"
    return True, f"condition {cond}: {sum(r['witness'] is not None for r in report['instances'])} witnesses re-verified"

