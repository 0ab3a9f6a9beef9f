"""Gyrogroup abstraction, derived gyrations and coaddition, and the
axiom/identity verification engine.

A model supplies only the identity, ``oplus`` and ``ominus``.  Gyrations are
always derived through the gyrator identity

    gyr[a, b](c) = ⊖(a ⊕ b) ⊕ (a ⊕ (b ⊕ c))

and a model's closed form, when it has one, is used only as a cross-check.
"""

from __future__ import annotations

import abc
import itertools
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

MAX_FAILURES = 32


class GyroError(Exception):
    """Base class for library errors."""


class ModelMismatchError(GyroError, ValueError):
    """An element was combined with a model it does not belong to."""


class NumericError(GyroError, ArithmeticError):
    """A floating-point model produced a non-finite or out-of-domain value."""


class GyroModel(abc.ABC):
    """A gyrogroup given by its identity, ⊕ and ⊖.

    ``tolerance`` is the equality threshold on :meth:`residual`; finite models
    use 0 and therefore compare exactly.
    """

    name: str = "model"
    tolerance: float = 0.0

    @property
    @abc.abstractmethod
    def identity(self) -> Any: ...

    @abc.abstractmethod
    def oplus(self, a, b): ...

    @abc.abstractmethod
    def ominus(self, a): ...

    @abc.abstractmethod
    def contains(self, x) -> bool: ...

    @abc.abstractmethod
    def sample(self, rng: random.Random): ...

    def elements(self) -> Sequence | None:
        """All elements for finite carriers, ``None`` otherwise."""
        return None

    @property
    def is_finite(self) -> bool:
        return self.elements() is not None

    def residual(self, x, y) -> float:
        return 0.0 if x == y else 1.0

    def eq(self, x, y) -> bool:
        return self.residual(x, y) <= self.tolerance

    def gyr_closed(self, a, b, c):
        """Closed-form gyration, or ``None`` when the model has none."""
        return None

    @property
    def has_closed_gyr(self) -> bool:
        return False

    def encode(self, x) -> Any:
        return x

    def decode(self, obj) -> Any:
        return obj

    def describe(self) -> dict:
        return {"name": self.name}

    def require(self, *xs) -> None:
        for x in xs:
            if not self.contains(x):
                raise ModelMismatchError(f"{x!r} is not an element of {self.name}")

    # derived operations, unchecked; the module-level functions validate
    def minus(self, a, b):
        return self.oplus(a, self.ominus(b))

    def gyr(self, a, b, c):
        return self.oplus(self.ominus(self.oplus(a, b)), self.oplus(a, self.oplus(b, c)))

    def coplus(self, a, b):
        return self.oplus(a, self.gyr(a, self.ominus(b), b))

    def cominus(self, a, b):
        return self.oplus(a, self.ominus(self.gyr(a, b, b)))


def gyr(model: GyroModel, a, b, c):
    """Gyration gyr[a, b](c) derived from ⊕ and ⊖."""
    model.require(a, b, c)
    return model.gyr(a, b, c)


def coplus(model: GyroModel, a, b):
    """Coaddition a ⊞ b = a ⊕ gyr[a, ⊖b](b)."""
    model.require(a, b)
    return model.coplus(a, b)


def cominus(model: GyroModel, a, b):
    """Cosubtraction a ⊟ b = a ⊖ gyr[a, b](b)."""
    model.require(a, b)
    return model.cominus(a, b)


def coplus_solve(model: GyroModel, x, y):
    """The unique u with x ⊞ u = y.

    From x ⊞ u = x ⊕ (⊖(x ⊖ u) ⊕ x): left cancellation gives
    ⊖(x ⊖ u) ⊕ x = ⊖x ⊕ y =: w, hence x ⊖ u = x ⊟ w and
    u = ⊖(⊖x ⊕ (x ⊟ w)).
    """
    w = model.oplus(model.ominus(x), y)
    z = model.cominus(x, w)
    return model.ominus(model.oplus(model.ominus(x), z))


@dataclass
class Failure:
    inputs: tuple
    lhs: Any
    rhs: Any
    residual: float


@dataclass
class IdentityReport:
    identity: str
    samples: int = 0
    failures: list[Failure] = field(default_factory=list)
    exhaustive: bool = False
    max_residual: float = 0.0
    violations: int = 0  # may exceed len(failures), which is capped

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self, model: GyroModel) -> dict:
        enc = _encoder(model)
        return {
            "identity": self.identity,
            "samples": self.samples,
            "exhaustive": self.exhaustive,
            "max_residual": self.max_residual,
            "violations": self.violations,
            "failures": [
                {
                    "inputs": [enc(x) for x in f.inputs],
                    "lhs": enc(f.lhs),
                    "rhs": enc(f.rhs),
                    "residual": f.residual,
                }
                for f in self.failures
            ],
        }


def _encoder(model: GyroModel) -> Callable[[Any], Any]:
    def enc(x):
        if isinstance(x, tuple):
            return [enc(v) for v in x]
        return model.encode(x)

    return enc


def _residual(model: GyroModel, lhs, rhs) -> float:
    if isinstance(lhs, tuple):
        return max(model.residual(x, y) for x, y in zip(lhs, rhs))
    return model.residual(lhs, rhs)


@dataclass(frozen=True)
class Check:
    name: str
    arity: int
    sides: Callable[..., tuple[Any, Any]]


def run_check(model: GyroModel, check: Check, budget: int, seed: int,
              tolerance: float | None = None) -> IdentityReport:
    """Evaluate one identity exhaustively (finite carrier) or on ``budget``
    seeded samples.  Failures are collected, not raised."""
    if budget < 1:
        raise ValueError("sample budget must be >= 1")
    tol = model.tolerance if tolerance is None else tolerance
    report = IdentityReport(check.name)
    elements = model.elements()
    if elements is not None:
        inputs: Iterable[tuple] = itertools.product(elements, repeat=check.arity)
        report.exhaustive = True
    else:
        rng = random.Random(f"{seed}:{check.name}")
        inputs = (tuple(model.sample(rng) for _ in range(check.arity)) for _ in range(budget))
    for args in inputs:
        lhs, rhs = check.sides(model, *args)
        res = _residual(model, lhs, rhs)
        report.samples += 1
        report.max_residual = max(report.max_residual, res)
        if res > tol:
            report.violations += 1
            if len(report.failures) < MAX_FAILURES:
                report.failures.append(Failure(args, lhs, rhs, res))
    return report


def _g1(m, x):
    e = m.identity
    return (m.oplus(e, x), m.oplus(x, e)), (x, x)


def _g2(m, x):
    e = m.identity
    nx = m.ominus(x)
    return (m.oplus(nx, x), m.oplus(x, nx)), (e, e)


def _g3(m, a, b, x, y):
    # left gyroassociativity plus gyr[a, b] being an automorphism: additive,
    # with two-sided inverse gyr[b, a]
    g = m.gyr
    lhs = (
        m.oplus(a, m.oplus(b, x)),
        g(a, b, m.oplus(x, y)),
        g(b, a, g(a, b, x)),
        g(a, b, g(b, a, x)),
    )
    rhs = (
        m.oplus(m.oplus(a, b), g(a, b, x)),
        m.oplus(g(a, b, x), g(a, b, y)),
        x,
        x,
    )
    return lhs, rhs


def _g4(m, a, b, z):
    return m.gyr(m.oplus(a, b), b, z), m.gyr(a, b, z)


AXIOMS: tuple[Check, ...] = (
    Check("G1-identity", 1, _g1),
    Check("G2-inverse", 1, _g2),
    Check("G3-gyroassociativity", 4, _g3),
    Check("G4-left-loop", 3, _g4),
)


def _gyrator(m, a, b, c):
    if m.has_closed_gyr:
        return m.gyr(a, b, c), m.gyr_closed(a, b, c)
    return m.oplus(a, m.oplus(b, c)), m.oplus(m.oplus(a, b), m.gyr(a, b, c))


IDENTITIES: tuple[Check, ...] = (
    Check("involution", 1, lambda m, a: (m.ominus(m.ominus(a)), a)),
    Check("left-cancellation", 2, lambda m, a, b: (m.oplus(m.ominus(a), m.oplus(a, b)), b)),
    Check("gyrator-identity", 3, _gyrator),
    Check(
        "inverse-of-sum", 2,
        lambda m, a, b: (m.ominus(m.oplus(a, b)), m.gyr(a, b, m.minus(m.ominus(b), a))),
    ),
    Check(
        "gyrotranslation", 3,
        lambda m, a, b, c: (
            m.oplus(m.oplus(m.ominus(a), b), m.gyr(m.ominus(a), b, m.oplus(m.ominus(b), c))),
            m.oplus(m.ominus(a), c),
        ),
    ),
    # gyr[⊖a, ⊖b] = gyr[a, b]; the swapped pair gyr[⊖b, ⊖a] is the inverse
    # gyration and differs from gyr[a, b] whenever gyrations are not involutive
    Check(
        "even-property", 3,
        lambda m, a, b, c: (m.gyr(a, b, c), m.gyr(m.ominus(a), m.ominus(b), c)),
    ),
    Check("inversive-symmetry", 3, lambda m, a, b, c: (m.gyr(a, b, m.gyr(b, a, c)), c)),
    Check("left-cancellation-2", 2, lambda m, a, b: (m.oplus(a, m.oplus(m.ominus(a), b)), b)),
    Check("first-right-cancellation", 2, lambda m, a, b: (m.coplus(m.minus(b, a), a), b)),
    Check("second-right-cancellation", 2, lambda m, a, b: (m.oplus(m.cominus(b, a), a), b)),
    Check(
        "cogyroautomorphic-inverse", 2,
        lambda m, a, b: (m.ominus(m.coplus(a, b)), m.coplus(m.ominus(b), m.ominus(a))),
    ),
    Check(
        "coaddition-decomposition", 2,
        lambda m, x, y: (
            m.coplus(x, y),
            m.oplus(x, m.oplus(m.ominus(m.minus(x, y)), x)),
        ),
    ),
)


def check_axioms(model: GyroModel, budget: int = 10_000, seed: int = 0,
                 tolerance: float | None = None) -> list[IdentityReport]:
    """One report per gyrogroup axiom G1..G4."""
    return [run_check(model, c, budget, seed, tolerance) for c in AXIOMS]


def check_identities(model: GyroModel, budget: int = 10_000, seed: int = 0,
                     tolerance: float | None = None) -> list[IdentityReport]:
    """One report per derived gyrogroup identity (cancellation laws, gyration
    symmetries, cogyrogroup laws)."""
    return [run_check(model, c, budget, seed, tolerance) for c in IDENTITIES]
