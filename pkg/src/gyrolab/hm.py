"""The Hartman-Mycielski extension: step functions [0, 1) -> G under
pointwise operations.

Breakpoints are exact ``Fraction`` values, every piece is half-open
``[a_k, a_{k+1})``, and every constructor merges adjacent pieces carrying the
same value, so two step functions are equal iff their (breakpoints, values)
agree.  Measures of violation sets are exact, which keeps the strict
inequality in ``O(U, eps)`` membership free of rounding.
"""

from __future__ import annotations

import bisect
import heapq
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence

from gyrolab.core import GyroError, GyroModel, ModelMismatchError
from gyrolab.models import sample_disk
from gyrolab.rational import as_rational, format_rational, parse_rational

ZERO = Fraction(0)
ONE = Fraction(1)


class StepFunctionError(GyroError, ValueError):
    """Breakpoints or values violate the step-function invariants."""


class NotAHomomorphism(GyroError, ValueError):
    """A map offered for lifting does not preserve ⊕."""


@dataclass(frozen=True)
class StepFunction:
    model: GyroModel
    breakpoints: tuple[Fraction, ...]
    values: tuple

    def __post_init__(self):
        bps = tuple(as_rational(b) for b in self.breakpoints)
        vals = tuple(self.values)
        if len(bps) < 2 or bps[0] != ZERO or bps[-1] != ONE:
            raise StepFunctionError(f"breakpoints must run from 0 to 1, got {_fmt(bps)}")
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise StepFunctionError(f"breakpoints not strictly increasing: {_fmt(bps)}")
        if len(vals) != len(bps) - 1:
            raise StepFunctionError(f"{len(bps)} breakpoints need {len(bps) - 1} values, got {len(vals)}")
        self.model.require(*vals)
        # merge equal neighbours
        keep_b = [bps[0]]
        keep_v = [vals[0]]
        for b, v in zip(bps[1:-1], vals[1:]):
            if v == keep_v[-1]:
                continue
            keep_b.append(b)
            keep_v.append(v)
        keep_b.append(ONE)
        object.__setattr__(self, "breakpoints", tuple(keep_b))
        object.__setattr__(self, "values", tuple(keep_v))

    def __call__(self, r) -> Any:
        r = as_rational(r) if not isinstance(r, float) else r
        if not 0 <= r < 1:
            raise ValueError(f"step functions live on [0, 1), got {r}")
        return self.values[bisect.bisect_right(self.breakpoints, r) - 1]

    def pieces(self) -> Iterable[tuple[Fraction, Fraction, Any]]:
        return zip(self.breakpoints, self.breakpoints[1:], self.values)

    @property
    def is_constant(self) -> bool:
        return len(self.values) == 1

    def to_json(self) -> dict:
        return {
            "model": self.model.name,
            "breakpoints": [format_rational(b) for b in self.breakpoints],
            "values": [self.model.encode(v) for v in self.values],
        }

    @classmethod
    def from_json(cls, obj: dict, model: GyroModel) -> "StepFunction":
        if obj.get("model") not in (None, model.name):
            raise ModelMismatchError(f"step function over {obj['model']!r}, expected {model.name!r}")
        try:
            bps = [parse_rational(b) for b in obj["breakpoints"]]
            vals = [model.decode(v) for v in obj["values"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise StepFunctionError(f"malformed step function: {exc}") from None
        return cls(model, tuple(bps), tuple(vals))

    def __repr__(self) -> str:
        parts = ", ".join(f"[{format_rational(a)},{format_rational(b)}):{v!r}" for a, b, v in self.pieces())
        return f"StepFunction({parts})"


def _fmt(bps) -> str:
    return "[" + ", ".join(format_rational(b) for b in bps) + "]"


def embed(model: GyroModel, x) -> StepFunction:
    """The constant step function x^•."""
    return StepFunction(model, (ZERO, ONE), (x,))


def step(model: GyroModel, breakpoints: Sequence, values: Sequence) -> StepFunction:
    return StepFunction(model, tuple(as_rational(b) for b in breakpoints), tuple(values))


def refine(*fs: StepFunction) -> tuple[tuple[Fraction, ...], list[tuple]]:
    """Common refinement: the sorted union of all breakpoints and each
    function's values re-expressed on it."""
    if not fs:
        raise ValueError("refine needs at least one step function")
    model = fs[0].model
    for f in fs[1:]:
        if f.model != model:
            raise ModelMismatchError(f"cannot combine step functions over {model.name} and {f.model.name}")
    if len(fs) == 1:
        return fs[0].breakpoints, [fs[0].values]
    common = []
    for b in heapq.merge(*(f.breakpoints for f in fs)):
        if not common or b != common[-1]:
            common.append(b)
    cols = []
    for f in fs:
        vals = []
        k = 0
        fb = f.breakpoints
        for a in common[:-1]:
            while fb[k + 1] <= a:
                k += 1
            vals.append(f.values[k])
        cols.append(tuple(vals))
    return tuple(common), cols


def pointwise(op: Callable, *fs: StepFunction, model: GyroModel | None = None) -> StepFunction:
    common, cols = refine(*fs)
    target = fs[0].model if model is None else model
    return StepFunction(target, common, tuple(op(*vs) for vs in zip(*cols)))


def hm_oplus(f: StepFunction, g: StepFunction) -> StepFunction:
    return pointwise(f.model.oplus, f, g)


def hm_ominus(f: StepFunction) -> StepFunction:
    return StepFunction(f.model, f.breakpoints, tuple(f.model.ominus(v) for v in f.values))


def hm_gyr(f: StepFunction, g: StepFunction, h: StepFunction) -> StepFunction:
    return pointwise(f.model.gyr, f, g, h)


@dataclass(frozen=True)
class HMModel(GyroModel):
    """G^• as a gyrogroup over step functions.

    Gyrations come from the gyrator identity applied piece by piece; when the
    base has a closed-form gyration, its pointwise lift is the cross-check.
    """

    base: GyroModel
    max_breakpoints: int = 6
    denominator: int = 24

    @property
    def name(self) -> str:
        return f"hm({self.base.name})"

    @property
    def tolerance(self) -> float:
        return self.base.tolerance

    @property
    def identity(self) -> StepFunction:
        return embed(self.base, self.base.identity)

    def oplus(self, a, b):
        return hm_oplus(a, b)

    def ominus(self, a):
        return hm_ominus(a)

    def contains(self, x) -> bool:
        return isinstance(x, StepFunction) and x.model == self.base

    def sample(self, rng: random.Random) -> StepFunction:
        return random_step_function(self.base, rng, self.max_breakpoints, self.denominator)

    def residual(self, x, y) -> float:
        _, (xs, ys) = refine(x, y)
        return max(self.base.residual(u, v) for u, v in zip(xs, ys))

    def gyr(self, a, b, c):
        # every operation is pointwise, so the gyrator identity on G^• is the
        # base gyrator evaluated piece by piece (at the base's precision)
        return hm_gyr(a, b, c)

    def gyr_closed(self, a, b, c):
        if not self.base.has_closed_gyr:
            return None
        return pointwise(self.base.gyr_closed, a, b, c)

    @property
    def has_closed_gyr(self) -> bool:
        return self.base.has_closed_gyr

    def encode(self, x) -> dict:
        return x.to_json()

    def decode(self, obj) -> StepFunction:
        return StepFunction.from_json(obj, self.base)

    def describe(self) -> dict:
        return {"name": self.name, "base": self.base.describe()}


def random_partition(rng: random.Random, max_breakpoints: int = 6, denominator: int = 24,
                     extra: Iterable[Fraction] = ()) -> list[Fraction]:
    """0 = a_0 < ... < a_n = 1 with at most ``max_breakpoints`` points drawn
    from the grid 1/denominator, plus any ``extra`` points."""
    k = rng.randint(0, max(0, max_breakpoints - 2))
    interior = {Fraction(rng.randrange(1, denominator), denominator) for _ in range(k)}
    interior.update(x for x in extra if 0 < x < 1)
    return [ZERO, *sorted(interior), ONE]


def random_step_function(model: GyroModel, rng: random.Random, max_breakpoints: int = 6,
                         denominator: int = 24) -> StepFunction:
    bps = random_partition(rng, max_breakpoints, denominator)
    return StepFunction(model, tuple(bps), tuple(model.sample(rng) for _ in bps[:-1]))


# neighbourhoods of the identity


class Neighborhood:
    """A finitely decidable set containing the identity."""

    kind: str = "abstract"

    def contains(self, x) -> bool:
        raise NotImplementedError

    def sample(self, model: GyroModel, rng: random.Random):
        raise NotImplementedError

    def members(self) -> Sequence | None:
        """Explicit members when the set is finite and enumerable."""
        return None

    def params(self) -> dict:
        return {}

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": self.params()}

    def __contains__(self, x) -> bool:
        return self.contains(x)


@dataclass(frozen=True)
class Subset(Neighborhood):
    elements: frozenset
    kind = "subset"

    def __post_init__(self):
        object.__setattr__(self, "elements", frozenset(self.elements))
        object.__setattr__(self, "_sorted", tuple(sorted(self.elements)))

    def contains(self, x) -> bool:
        return x in self.elements

    def sample(self, model, rng):
        return rng.choice(self._sorted)

    def members(self):
        return self._sorted

    def params(self):
        return {"elements": list(self._sorted)}

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return "{" + ",".join(map(str, self._sorted)) + "}"


@dataclass(frozen=True)
class Ball(Neighborhood):
    """Open ball |z| < radius about the identity of the Möbius disk."""

    radius: float
    kind = "ball"

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")

    def contains(self, x) -> bool:
        return abs(x) < self.radius

    def sample(self, model, rng):
        return sample_disk(rng, min(self.radius, getattr(model, "rho_max", 1.0)))

    def params(self):
        return {"radius": self.radius}


@dataclass(frozen=True)
class Carrier(Neighborhood):
    """The whole carrier."""

    kind = "carrier"

    def contains(self, x) -> bool:
        return True

    def sample(self, model, rng):
        return model.sample(rng)


@dataclass(frozen=True)
class HMNeighborhood(Neighborhood):
    """O(U, eps): step functions whose violation set of U has measure < eps."""

    base: Neighborhood
    epsilon: Fraction
    kind = "lifted"

    def __post_init__(self):
        eps = as_rational(self.epsilon)
        if eps <= 0:
            raise ValueError("epsilon must be positive")
        object.__setattr__(self, "epsilon", eps)

    def contains(self, f) -> bool:
        return in_O(f, self)

    def sample(self, model, rng):
        base = model.base if isinstance(model, HMModel) else model
        return sample_in_O(base, self.base, self.epsilon, rng)

    def params(self):
        return {"base": self.base.to_json(), "epsilon": format_rational(self.epsilon)}

    def __repr__(self):
        return f"O({self.base!r}, {format_rational(self.epsilon)})"


def neighborhood_from_json(obj: dict) -> Neighborhood:
    kind, params = obj.get("kind"), obj.get("params", {})
    if kind == "subset":
        return Subset(frozenset(params["elements"]))
    if kind == "ball":
        return Ball(float(params["radius"]))
    if kind == "carrier":
        return Carrier()
    if kind == "lifted":
        return HMNeighborhood(neighborhood_from_json(params["base"]), parse_rational(params["epsilon"]))
    raise ValueError(f"unknown neighbourhood kind {kind!r}")


def violation_measure(f: StepFunction, U: Neighborhood) -> Fraction:
    """μ{r : f(r) ∉ U}, exactly."""
    return sum((b - a for a, b, v in f.pieces() if not U.contains(v)), ZERO)


def in_O(f: StepFunction, hood: HMNeighborhood) -> bool:
    return violation_measure(f, hood.base) < hood.epsilon


def in_coset(f: StepFunction, g: StepFunction, hood: HMNeighborhood) -> bool:
    """g ∈ f ⊕ O(U, eps), decided as ⊖f ⊕ g ∈ O(U, eps)."""
    return in_O(hm_oplus(hm_ominus(f), g), hood)


def sample_in_O(model: GyroModel, U: Neighborhood, eps: Fraction, rng: random.Random,
                max_breakpoints: int = 6, denominator: int = 24) -> StepFunction:
    """A random member of O(U, eps).

    A window [s, s + w) with w < eps may carry arbitrary values; outside it
    every value is drawn from U, so the violation measure is at most w.
    """
    eps = as_rational(eps)
    cap = min(eps, ONE)
    grid = 4 * denominator
    # w in [0, cap), strictly below eps
    w = cap * Fraction(rng.randrange(grid), grid)
    s = (ONE - w) * Fraction(rng.randrange(grid + 1), grid)
    bps = random_partition(rng, max_breakpoints, denominator, extra=(s, s + w))
    values = []
    for a in bps[:-1]:
        if s <= a < s + w:
            values.append(model.sample(rng))
        else:
            values.append(U.sample(model, rng))
    f = StepFunction(model, tuple(bps), tuple(values))
    assert violation_measure(f, U) <= w < eps
    return f


# path to the identity


def path_point(f: StepFunction, t) -> StepFunction:
    """f_t: on each piece [a_k, a_{k+1}) keep f on [a_k, b) and use e on
    [b, a_{k+1}), where b = a_k + t (a_{k+1} - a_k)."""
    t = as_rational(t)
    if not 0 <= t <= 1:
        raise ValueError(f"path parameter must lie in [0, 1], got {t}")
    e = f.model.identity
    bps = [ZERO]
    vals = []
    for a, b, v in f.pieces():
        cut = a + t * (b - a)
        if cut > a:
            vals.append(v)
            bps.append(cut)
        if cut < b:
            vals.append(e)
            bps.append(b)
    return StepFunction(f.model, tuple(bps), tuple(vals))


def disagreement(f: StepFunction, g: StepFunction) -> Fraction:
    """μ{r : f(r) ≠ g(r)} under the model's equality."""
    common, (fs, gs) = refine(f, g)
    eq = f.model.eq
    return sum((b - a for a, b, x, y in zip(common, common[1:], fs, gs) if not eq(x, y)), ZERO)


def path_disagreement(f: StepFunction, s, t) -> Fraction:
    return disagreement(path_point(f, s), path_point(f, t))


# liftings


def validate_homomorphism(phi: Callable, source: GyroModel, target: GyroModel,
                          budget: int = 1000, seed: int = 0) -> list[tuple]:
    """Pairs (a, b) where phi(a ⊕ b) ≠ phi(a) ⊕ phi(b); exhaustive on finite
    sources.  Raises if phi leaves the target carrier."""
    elements = source.elements()
    if elements is not None:
        pairs = ((a, b) for a in elements for b in elements)
    else:
        rng = random.Random(f"{seed}:hom")
        pairs = ((source.sample(rng), source.sample(rng)) for _ in range(budget))
    bad = []
    for a, b in pairs:
        pa, pb, pab = phi(a), phi(b), phi(source.oplus(a, b))
        for y in (pa, pb, pab):
            if not target.contains(y):
                raise ModelMismatchError(f"phi maps into {y!r}, outside {target.name}")
        if not target.eq(pab, target.oplus(pa, pb)):
            bad.append((a, b))
    return bad


def lift_hom(phi: Callable, f: StepFunction, target: GyroModel, validate: bool = True) -> StepFunction:
    """φ^•(f) = φ ∘ f."""
    if validate:
        bad = validate_homomorphism(phi, f.model, target)
        if bad:
            a, b = bad[0]
            raise NotAHomomorphism(f"phi({a} ⊕ {b}) ≠ phi({a}) ⊕ phi({b})")
    vals = tuple(phi(v) for v in f.values)
    for y in vals:
        if not target.contains(y):
            raise ModelMismatchError(f"phi maps into {y!r}, outside {target.name}")
    return StepFunction(target, f.breakpoints, vals)


def _exact_ratio(x):
    if isinstance(x, (int, Fraction)):
        return Fraction(x) / (1 + Fraction(x))
    return x / (1 + x)


@dataclass(frozen=True)
class BoundedPseudometric:
    evaluator: Callable[[Any, Any], Any]
    bound: float
    is_metric: bool = False
    name: str = "d"

    def __call__(self, x, y):
        return self.evaluator(x, y)

    def violations(self, model: GyroModel, budget: int = 1000, seed: int = 0,
                   tol: float = 0.0) -> list[str]:
        """Sampled (exhaustive on finite models) check of d(x,x)=0, symmetry,
        the bound, and the triangle inequality."""
        elements = model.elements()
        if elements is not None:
            triples = ((x, y, z) for x in elements for y in elements for z in elements)
        else:
            rng = random.Random(f"{seed}:pseudometric")
            triples = ((model.sample(rng), model.sample(rng), model.sample(rng)) for _ in range(budget))
        out = []
        for x, y, z in triples:
            dxy, dyx = self(x, y), self(y, x)
            if abs(self(x, x)) > tol:
                out.append(f"d({x!r},{x!r}) != 0")
            if dxy < 0 or abs(dxy - dyx) > tol or dxy > self.bound + tol:
                out.append(f"symmetry/bound fails at {x!r},{y!r}")
            if dxy > self(x, z) + self(z, y) + tol:
                out.append(f"triangle fails at {x!r},{z!r},{y!r}")
        return out


def normalized(d: Callable[[Any, Any], Any], name: str = "d/(1+d)") -> BoundedPseudometric:
    """d ↦ d / (1 + d), a pseudometric bounded by 1 (exact on rational d)."""
    return BoundedPseudometric(lambda x, y: _exact_ratio(d(x, y)), 1.0, name=name)


def discrete_metric(model: GyroModel) -> BoundedPseudometric:
    return BoundedPseudometric(lambda x, y: 0 if model.eq(x, y) else 1, 1, True, "discrete")


def hm_pseudometric(d: BoundedPseudometric | Callable, f: StepFunction, g: StepFunction):
    """d^•(f, g) = Σ (a_{k+1} - a_k) d(f_k, g_k) over the common refinement;
    exact whenever d returns integers or Fractions."""
    common, (fs, gs) = refine(f, g)
    return sum(((b - a) * d(x, y) for a, b, x, y in zip(common, common[1:], fs, gs)), ZERO)


def lift_function(F: Callable[[Any], Any], g: StepFunction):
    """F^•(g) = Σ (a_{k+1} - a_k) F(g(a_k))."""
    return sum(((b - a) * F(v) for a, b, v in g.pieces()), ZERO)


# embedding, closedness, countable base


def embedding_trace(model: GyroModel, V: Neighborhood) -> tuple[set, set]:
    """(i_G(V), i_G(G) ∩ O(V, 1/2)) as sets of elements, finite models only."""
    elements = model.elements()
    if elements is None:
        raise ValueError("embedding trace needs a finite carrier")
    hood = HMNeighborhood(V, Fraction(1, 2))
    lhs = {x for x in elements if V.contains(x)}
    rhs = {x for x in elements if in_O(embed(model, x), hood)}
    return lhs, rhs


@dataclass
class ClosednessWitness:
    x1: Any
    x2: Any
    piece1: tuple[Fraction, Fraction]
    piece2: tuple[Fraction, Fraction]
    V: Neighborhood
    epsilon: Fraction
    hits: list = field(default_factory=list)  # constants found inside f ⊕ O(V, eps)

    @property
    def holds(self) -> bool:
        return not self.hits


def _translate(model: GyroModel, x, V: Neighborhood) -> set:
    return {model.oplus(x, v) for v in V.members()}


def closedness_witness(f: StepFunction, candidates: Iterable[Neighborhood]) -> ClosednessWitness | None:
    """For non-constant f over a finite model: pick two pieces with distinct
    values x1 ≠ x2, a candidate V with (x1 ⊕ V) ∩ (x2 ⊕ V) = ∅ and
    eps = min of the two piece lengths, then list every constant x^• that
    lands in f ⊕ O(V, eps) (there should be none)."""
    model = f.model
    elements = model.elements()
    if elements is None:
        raise ValueError("closedness witness needs a finite carrier")
    if f.is_constant:
        return None
    pieces = list(f.pieces())
    a1, a2, x1 = pieces[0]
    a3, a4, x2 = next(p for p in pieces if p[2] != x1)
    for V in candidates:
        if V.members() is None:
            continue
        if _translate(model, x1, V) & _translate(model, x2, V):
            continue
        eps = min(a2 - a1, a4 - a3)
        hood = HMNeighborhood(V, eps)
        hits = [x for x in elements if in_coset(f, embed(model, x), hood)]
        return ClosednessWitness(x1, x2, (a1, a2), (a3, a4), V, eps, hits)
    return None


def first_countable_base(inner: Iterable[Neighborhood], n: int) -> list[HMNeighborhood]:
    """The lifted family {O(V, 1/k) : V in inner, 1 <= k <= n}."""
    inner = list(inner)
    return [HMNeighborhood(V, Fraction(1, k)) for k in range(1, n + 1) for V in inner]


def gyrodistance(model: GyroModel) -> Callable[[Any, Any], float]:
    """|⊖x ⊕ y| for the Möbius disk, a metric bounded by 1."""
    return lambda x, y: abs(model.oplus(model.ominus(x), y))


def euclidean(x, y) -> float:
    return abs(x - y)
