"""Concrete gyrogroups: Cayley tables, groups as degenerate gyrogroups, the
Möbius disk, and exhaustive search for small Cayley gyrogroups."""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import gmpy2

from gyrolab.core import GyroError, GyroModel, NumericError

MAX_SEARCH_ORDER = 8


class CayleyFormatError(GyroError, ValueError):
    """Malformed or structurally invalid Cayley table."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None,
                 source: str | None = None):
        where = [str(source)] if source else []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.message = message
        self.line = line
        self.column = column
        self.source = source


@dataclass(frozen=True)
class CayleyGyrogroup(GyroModel):
    """Finite gyrogroup given by its table, ``table[i][j] = i ⊕ j``; the
    identity is index 0.  Structural invariants are validated on construction,
    the gyrogroup axioms are not (use :func:`gyrolab.core.check_axioms`)."""

    table: tuple[tuple[int, ...], ...]
    name: str = "cayley"
    inverse: tuple[int, ...] = field(init=False, repr=False, compare=False)
    _lines: tuple[int, ...] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        table = tuple(tuple(int(v) for v in row) for row in self.table)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "inverse", _validate_table(table, self._lines))

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def identity(self) -> int:
        return 0

    def oplus(self, a, b):
        return self.table[a][b]

    def ominus(self, a):
        return self.inverse[a]

    def contains(self, x) -> bool:
        return isinstance(x, int) and not isinstance(x, bool) and 0 <= x < len(self.table)

    def sample(self, rng: random.Random) -> int:
        return rng.randrange(len(self.table))

    def elements(self) -> Sequence[int]:
        return range(len(self.table))

    def decode(self, obj) -> int:
        if not self.contains(obj):
            raise ValueError(f"{obj!r} is not an element of {self.name}")
        return obj

    def describe(self) -> dict:
        return {"name": self.name, "order": self.order, "table": [list(r) for r in self.table]}

    def is_group(self) -> bool:
        t, n = self.table, self.order
        return all(t[t[a][b]][c] == t[a][t[b][c]]
                   for a in range(n) for b in range(n) for c in range(n))

    def has_trivial_gyrations(self) -> bool:
        n = self.order
        return all(self.gyr(a, b, c) == c for a in range(n) for b in range(n) for c in range(n))

    def format(self) -> str:
        lines = [str(self.order)]
        lines += [" ".join(str(v) for v in row) for row in self.table]
        return "\n".join(lines) + "\n"


def _validate_table(table, lines=None) -> tuple[int, ...]:
    n = len(table)
    if n == 0:
        raise CayleyFormatError("empty table")

    def line_of(i):
        return lines[i] if lines is not None else i + 1

    for i, row in enumerate(table):
        if len(row) != n:
            raise CayleyFormatError(f"ragged row: expected {n} entries, got {len(row)}", line_of(i))
        for j, v in enumerate(row):
            if not 0 <= v < n:
                raise CayleyFormatError(f"entry {v} out of range 0..{n - 1}", line_of(i), j + 1)
    for i, row in enumerate(table):
        if row[0] != i:
            raise CayleyFormatError(f"identity 0 fails: {i} ⊕ 0 = {row[0]}", line_of(i), 1)
    for j, v in enumerate(table[0]):
        if v != j:
            raise CayleyFormatError(f"identity 0 fails: 0 ⊕ {j} = {v}", line_of(0), j + 1)
    for i, row in enumerate(table):
        if len(set(row)) != n:
            seen = set()
            for j, v in enumerate(row):
                if v in seen:
                    raise CayleyFormatError("row not a permutation", line_of(i), j + 1)
                seen.add(v)
    inverse = []
    for i, row in enumerate(table):
        j = row.index(0)
        if table[j][i] != 0:
            raise CayleyFormatError(
                f"missing inverse for {i}: {i} ⊕ {j} = 0 but {j} ⊕ {i} = {table[j][i]}",
                line_of(i), j + 1,
            )
        inverse.append(j)
    return tuple(inverse)


def cyclic(n: int) -> CayleyGyrogroup:
    """ℤ_n under addition mod n."""
    if n < 1:
        raise ValueError("order must be positive")
    return CayleyGyrogroup(tuple(tuple((i + j) % n for j in range(n)) for i in range(n)), f"zn:{n}")


def klein() -> CayleyGyrogroup:
    """Klein four-group ℤ_2 × ℤ_2, elements encoded as 2-bit masks."""
    return CayleyGyrogroup(tuple(tuple(i ^ j for j in range(4)) for i in range(4)), "klein")


def cayley_parse(text: str, source: str | None = None) -> CayleyGyrogroup:
    """Parse a Cayley table.  An optional first line holding only ``n`` is
    accepted; ``#`` starts a comment."""
    rows: list[list[int]] = []
    linenos: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([int(tok) for tok in line.split()])
        except ValueError:
            bad = next(tok for tok in line.split() if not _is_int(tok))
            raise CayleyFormatError(f"not an integer: {bad!r}", lineno, source=source) from None
        linenos.append(lineno)
    if not rows:
        raise CayleyFormatError("no table rows", source=source)
    if len(rows[0]) == 1 and rows[0][0] == len(rows) - 1 and len(rows) > 1:
        rows, linenos = rows[1:], linenos[1:]
    try:
        return CayleyGyrogroup(tuple(tuple(r) for r in rows), name=source or "cayley",
                               _lines=tuple(linenos))
    except CayleyFormatError as exc:
        raise CayleyFormatError(exc.message, exc.line, exc.column, source) from None


def cayley_load(path: str | Path) -> CayleyGyrogroup:
    path = Path(path)
    return cayley_parse(path.read_text(), source=str(path))


def _is_int(tok: str) -> bool:
    try:
        int(tok)
    except ValueError:
        return False
    return True


# Möbius disk

DENOMINATOR_FLOOR = 1e-15
MODULUS_SLACK = 1e-12


def mobius_oplus(a: complex, b: complex) -> complex:
    """Möbius addition (a + b) / (1 + conj(a) b) on the open unit disk."""
    den = 1 + a.conjugate() * b
    if abs(den) < DENOMINATOR_FLOOR:
        raise NumericError(f"Möbius denominator vanished for a={a!r}, b={b!r}")
    z = (a + b) / den
    if not cmath.isfinite(z):
        raise NumericError(f"non-finite Möbius sum for a={a!r}, b={b!r}")
    if abs(z) >= 1 + MODULUS_SLACK:
        raise NumericError(f"Möbius sum left the disk: |{z!r}| >= 1")
    return z


def _mpc_oplus(a, b):
    return (a + b) / (1 + a.conjugate() * b)


def mobius_gyr_closed(a: complex, b: complex, c: complex) -> complex:
    return (1 + a * b.conjugate()) / (1 + a.conjugate() * b) * c


@dataclass(frozen=True)
class MobiusDisk(GyroModel):
    """The open complex unit disk under Möbius addition.

    ``tolerance`` is the absolute equality threshold; ``rho_max`` bounds the
    modulus of sampled elements.  Elements are plain ``complex`` values, but the
    gyrator-identity composite is evaluated with ``gyr_precision``-bit
    intermediates: near the boundary its inner points sit within ~1e-10 of the
    unit circle and double rounding there costs about seven digits.  Set
    ``gyr_precision=None`` for all-double evaluation.
    """

    tolerance: float = 1e-9
    rho_max: float = 0.999
    gyr_precision: int | None = 128
    name: str = "mobius"

    def __post_init__(self):
        if self.tolerance < 0:
            raise ValueError("tolerance must be nonnegative")
        if not 0 < self.rho_max < 1:
            raise ValueError("rho_max must lie in (0, 1)")

    @property
    def identity(self) -> complex:
        return 0j

    def oplus(self, a, b):
        return mobius_oplus(a, b)

    def ominus(self, a):
        return -a

    def gyr(self, a, b, c):
        if self.gyr_precision is None:
            return super().gyr(a, b, c)
        with gmpy2.context(precision=self.gyr_precision):
            a, b, c = gmpy2.mpc(a), gmpy2.mpc(b), gmpy2.mpc(c)
            z = _mpc_oplus(-_mpc_oplus(a, b), _mpc_oplus(a, _mpc_oplus(b, c)))
        z = complex(z)
        if not cmath.isfinite(z):
            raise NumericError(f"non-finite gyration for a={a!r}, b={b!r}, c={c!r}")
        return z

    def contains(self, x) -> bool:
        return isinstance(x, complex) and cmath.isfinite(x) and abs(x) < 1

    def sample(self, rng: random.Random) -> complex:
        return sample_disk(rng, self.rho_max)

    def residual(self, x, y) -> float:
        return abs(x - y)

    def gyr_closed(self, a, b, c):
        return mobius_gyr_closed(a, b, c)

    @property
    def has_closed_gyr(self) -> bool:
        return True

    def encode(self, x) -> list[float]:
        return [x.real, x.imag]

    def decode(self, obj) -> complex:
        z = complex(obj[0], obj[1])
        if not self.contains(z):
            raise ValueError(f"{obj!r} is not in the open unit disk")
        return z

    def describe(self) -> dict:
        return {"name": self.name, "tolerance": self.tolerance, "rho_max": self.rho_max}


def sample_disk(rng: random.Random, radius: float) -> complex:
    """Uniform (by area) sample from the open disk of the given radius."""
    r = radius * math.sqrt(rng.random())
    return cmath.rect(r, rng.uniform(-math.pi, math.pi))


# exhaustive search


@dataclass
class SearchResult:
    order: int
    scanned: int
    found: list[CayleyGyrogroup]
    proper: list[int]
    truncated: bool

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "scanned": self.scanned,
            "found": [[list(r) for r in g.table] for g in self.found],
            "proper": list(self.proper),
            "truncated": self.truncated,
        }


def is_gyrogroup_table(t: Sequence[Sequence[int]]) -> bool:
    """Fast fail-fast axiom test for a Latin table with identity 0 and
    two-sided inverses; gyrations derived from the gyrator identity."""
    n = len(t)
    inv = [row.index(0) for row in t]
    rng = range(n)
    gyrs = {}
    for a in rng:
        for b in rng:
            ab = t[a][b]
            nab = inv[ab]
            g = [t[nab][t[a][t[b][c]]] for c in rng]
            if len(set(g)) != n:
                return False
            # left gyroassociativity: a ⊕ (b ⊕ c) = (a ⊕ b) ⊕ gyr[a,b]c
            row_ab = t[ab]
            ta = t[a]
            tb = t[b]
            for c in rng:
                if ta[tb[c]] != row_ab[g[c]]:
                    return False
            for x in rng:
                gx = g[x]
                tx = t[x]
                tgx = t[gx]
                for y in rng:
                    if g[tx[y]] != tgx[g[y]]:
                        return False
            gyrs[a, b] = g
    for a in rng:
        for b in rng:
            if gyrs[t[a][b], b] != gyrs[a, b]:
                return False
    return True


def cayley_search(order: int, budget: int | None = None) -> SearchResult:
    """Enumerate Cayley gyrogroups of the given order with identity 0.

    Tables are filled cell by cell as Latin squares (rows are left
    translations, columns right translations; both are bijections in any
    gyrogroup), with the inverse pairing ``t[i][j] == 0 <=> t[j][i] == 0``
    enforced during the fill.  Each completed table counts as scanned and is
    then tested for the gyrogroup axioms.  Tables are produced in
    lexicographic order; no isomorph rejection is done.
    """
    if not 2 <= order <= MAX_SEARCH_ORDER:
        raise ValueError(f"order must be in 2..{MAX_SEARCH_ORDER}, got {order}")
    if budget is not None and budget < 1:
        raise ValueError("budget must be >= 1")
    n = order
    t = [[(i if j == 0 else j if i == 0 else -1) for j in range(n)] for i in range(n)]
    full = (1 << n) - 1
    row_used = [full if i == 0 else (1 << i) for i in range(n)]
    col_used = [full if j == 0 else (1 << j) for j in range(n)]
    cells = [(i, j) for i in range(1, n) for j in range(1, n)]
    found: list[CayleyGyrogroup] = []
    scanned = 0
    truncated = False

    def fill(k: int) -> bool:
        nonlocal scanned, truncated
        if k == len(cells):
            if budget is not None and scanned >= budget:
                truncated = True
                return False
            scanned += 1
            if is_gyrogroup_table(t):
                found.append(CayleyGyrogroup(tuple(tuple(r) for r in t), f"search:{n}:{len(found)}"))
            return True
        i, j = cells[k]
        free = ~(row_used[i] | col_used[j]) & full
        mirror = t[j][i]
        for v in range(n):
            bit = 1 << v
            if not free & bit:
                continue
            if mirror != -1 and (v == 0) != (mirror == 0):
                continue
            t[i][j] = v
            row_used[i] |= bit
            col_used[j] |= bit
            ok = fill(k + 1)
            row_used[i] &= ~bit
            col_used[j] &= ~bit
            t[i][j] = -1
            if not ok:
                return False
        return True

    fill(0)
    proper = [k for k, g in enumerate(found) if not g.has_trivial_gyrations()]
    return SearchResult(n, scanned, found, proper, truncated)
