"""Suite runners that turn library checks into uniform result rows
(suite, check, status, residual, witness, detail) for the CLI and scripts."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from gyrolab.core import GyroModel, IdentityReport, check_axioms, check_identities
from gyrolab.hm import (
    HMModel,
    StepFunction,
    discrete_metric,
    embed,
    euclidean,
    hm_gyr,
    hm_ominus,
    hm_oplus,
    hm_pseudometric,
    lift_function,
    normalized,
    path_disagreement,
    path_point,
    random_step_function,
)
from gyrolab.models import cayley_search
from gyrolab.neighborhoods import (
    CONDITIONS,
    BaseFamily,
    ConditionReport,
    PASS,
    FAIL,
    check_condition,
    check_lifted_condition,
    replay,
)
from gyrolab.rational import format_rational


@dataclass
class Row:
    suite: str
    check: str
    status: str
    residual: float | None = None
    witness: Any = None
    sampled: bool = False
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "check": self.check,
            "status": self.status,
            "residual": self.residual,
            "witness": self.witness,
            "sampled": self.sampled,
            "detail": self.detail,
        }


def _status(ok: bool) -> str:
    return PASS if ok else FAIL


def _identity_rows(suite: str, model: GyroModel, reports: Sequence[IdentityReport]) -> list[Row]:
    rows = []
    for r in reports:
        js = r.to_json(model)
        witness = js["failures"][0] if js["failures"] else None
        rows.append(Row(suite, r.identity, _status(r.passed), r.max_residual, witness,
                        not r.exhaustive, js))
    return rows


def axioms(model: GyroModel, samples: int, seed: int, tolerance: float) -> list[Row]:
    return _identity_rows("axioms", model, check_axioms(model, samples, seed, tolerance))


def identities(model: GyroModel, samples: int, seed: int, tolerance: float) -> list[Row]:
    return _identity_rows("identities", model, check_identities(model, samples, seed, tolerance))


def _condition_row(r: ConditionReport) -> Row:
    return Row(r.suite, f"condition-{r.condition}", r.status, None,
               r.witness if r.status == PASS else r.counterexample, r.sampled, r.to_json())


def conditions(model: GyroModel, family: BaseFamily, samples: int, seed: int,
               which: Sequence[int] = CONDITIONS) -> list[Row]:
    return [_condition_row(check_condition(model, family, c, samples, seed)) for c in which]


def lifted(model: GyroModel, family: BaseFamily, samples: int, seed: int,
           which: Sequence[int] = CONDITIONS) -> list[Row]:
    return [_condition_row(check_lifted_condition(model, family, c, samples, seed)) for c in which]


def hm_demo(model: GyroModel, samples: int, seed: int, tolerance: float) -> list[Row]:
    """Run the axiom and identity suites on G^• and attach one worked
    example of the pointwise operations."""
    hm = HMModel(model)
    rng = random.Random(f"{seed}:hm-demo")
    f, g, h = (random_step_function(model, rng) for _ in range(3))
    example = {
        "f": f.to_json(),
        "g": g.to_json(),
        "h": h.to_json(),
        "f_oplus_g": hm_oplus(f, g).to_json(),
        "ominus_f": hm_ominus(f).to_json(),
        "gyr_f_g_h": hm_gyr(f, g, h).to_json(),
    }
    rows = _identity_rows("hm-axioms", hm, check_axioms(hm, samples, seed, tolerance))
    rows += _identity_rows("hm-identities", hm, check_identities(hm, samples, seed, tolerance))
    rows.append(Row("hm-demo", "example", PASS, detail=example))
    return rows


def uniform_step(model: GyroModel, values: Sequence) -> StepFunction:
    """Step function taking values[k] on [k/n, (k+1)/n)."""
    n = len(values)
    if n == 0:
        raise ValueError("need at least one value")
    model.require(*values)
    return StepFunction(model, tuple(Fraction(k, n) for k in range(n + 1)), tuple(values))


def path(model: GyroModel, f: StepFunction, steps: int) -> list[Row]:
    if steps < 1:
        raise ValueError("steps must be >= 1")
    ts = [Fraction(k, steps) for k in range(steps + 1)]
    points = [path_point(f, t) for t in ts]
    table = [[format_rational(path_disagreement(f, s, t)) for t in ts] for s in ts]
    worst = None
    for s in ts:
        for t in ts:
            d = path_disagreement(f, s, t)
            if d > abs(s - t) and worst is None:
                worst = {"s": format_rational(s), "t": format_rational(t), "disagreement": format_rational(d)}
    neighbour = max(path_disagreement(f, s, t) for s, t in zip(ts, ts[1:]))
    detail = {
        "f": f.to_json(),
        "t": [format_rational(t) for t in ts],
        "points": [p.to_json() for p in points],
        "disagreement": table,
    }
    return [
        Row("path", "endpoint-0", _status(points[0] == embed(model, model.identity))),
        Row("path", "endpoint-1", _status(points[-1] == f)),
        Row("path", "lipschitz", _status(worst is None), float(neighbour), worst, detail=detail),
    ]


def metric(model: GyroModel, samples: int, seed: int, tolerance: float) -> list[Row]:
    """Metric axioms for d^• on random step-function triples, and for finite
    models the embedding identities d^•(x^•, y^•) = d(x, y), F^•(x^•) = F(x)."""
    if model.is_finite:
        d = discrete_metric(model)
        tol = 0.0
    else:
        d = normalized(euclidean, "|x-y|/(1+|x-y|)")
        tol = 1e-12
    rng = random.Random(f"{seed}:metric")
    worst = {"identity": 0.0, "symmetry": 0.0, "triangle": 0.0, "bound": 0.0}
    first: dict = {}

    def note(name, excess, data):
        excess = float(excess)
        worst[name] = max(worst[name], excess)
        if excess > tol and name not in first:
            first[name] = data()

    for _ in range(samples):
        f, g, h = (random_step_function(model, rng) for _ in range(3))
        dfg, dgf = hm_pseudometric(d, f, g), hm_pseudometric(d, g, f)
        data = lambda: [f.to_json(), g.to_json(), h.to_json()]
        note("identity", abs(hm_pseudometric(d, f, f)), data)
        note("symmetry", abs(dfg - dgf), data)
        note("triangle", dfg - hm_pseudometric(d, f, h) - hm_pseudometric(d, h, g), data)
        note("bound", dfg - d.bound, data)
    rows = [Row("metric", k, _status(k not in first), worst[k], first.get(k), True) for k in worst]
    elements = model.elements()
    if elements is not None:
        bad_d = [[x, y] for x in elements for y in elements
                 if hm_pseudometric(d, embed(model, x), embed(model, y)) != d(x, y)]
        F = lambda x: Fraction(x, len(elements))
        bad_F = [x for x in elements if lift_function(F, embed(model, x)) != F(x)]
        rows.append(Row("metric", "embedding-isometry", _status(not bad_d), None, bad_d[:1] or None))
        rows.append(Row("metric", "embedding-function", _status(not bad_F), None, bad_F[:1] or None))
    return rows


def search(order: int, budget: int | None = None) -> tuple[list[Row], dict]:
    result = cayley_search(order, budget)
    rows = []
    for k, g in enumerate(result.found):
        reports = check_axioms(g)
        rows.append(Row("search", f"table-{k:05d}", _status(all(r.passed for r in reports)),
                        None, None, False, {"table": [list(r) for r in g.table],
                                            "proper": k in result.proper}))
    summary = result.to_json()
    rows.append(Row("search", "summary", _status(not result.truncated), None, None, False,
                    {k: v for k, v in summary.items() if k != "found"}))
    return rows, summary


def replay_rows(document: dict) -> list[Row]:
    rows = []
    for res in document.get("results", []):
        detail = res.get("detail", {})
        if res.get("suite") not in ("base", "lifted") or "condition" not in detail:
            continue
        ok, message = replay(detail)
        rows.append(Row("replay", f"{res['suite']}-{res['check']}", _status(ok),
                        detail={"message": message, "recorded": res["status"]}))
    if not rows:
        raise ValueError("document contains no condition reports to replay")
    return rows
