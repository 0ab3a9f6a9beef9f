"""Independent reference computations used to cross-check the library.

Nothing here imports gyrolab internals: complex numbers are pairs of
Fractions, gyrogroup tables are checked from the axioms written out
directly, and table enumeration is plain brute force.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


class QC:
    """Exact complex number with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        self.re, self.im = Fraction(re), Fraction(im)

    def __add__(self, o):
        return QC(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        return QC(self.re - o.re, self.im - o.im)

    def __mul__(self, o):
        return QC(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def __truediv__(self, o):
        d = o.re * o.re + o.im * o.im
        n = self * o.conj()
        return QC(n.re / d, n.im / d)

    def __neg__(self):
        return QC(-self.re, -self.im)

    def conj(self):
        return QC(self.re, -self.im)

    def __eq__(self, o):
        return self.re == o.re and self.im == o.im

    def __complex__(self):
        return complex(float(self.re), float(self.im))


ONE = QC(1)


def mobius_add(a: QC, b: QC) -> QC:
    return (a + b) / (ONE + a.conj() * b)


def mobius_gyr_exact(a: QC, b: QC, c: QC) -> QC:
    """gyr[a,b]c from the gyrator identity in exact arithmetic."""
    return mobius_add(-mobius_add(a, b), mobius_add(a, mobius_add(b, c)))


def to_qc(z: complex) -> QC:
    return QC(Fraction(z.real), Fraction(z.imag))


def table_is_gyrogroup(t) -> bool:
    """Direct transcription of the four axioms for a table with identity 0."""
    n = len(t)
    R = range(n)
    op = lambda a, b: t[a][b]
    if any(op(0, x) != x for x in R):
        return False
    inv = {}
    for a in R:
        cands = [b for b in R if op(b, a) == 0]
        if len(cands) != 1:
            return False
        inv[a] = cands[0]

    def solve(a, y):
        # unique z with a ⊕ z = y, if any
        zs = [z for z in R if op(a, z) == y]
        return zs[0] if len(zs) == 1 else None

    gyr = {}
    for a in R:
        for b in R:
            m = []
            for c in R:
                z = solve(op(a, b), op(a, op(b, c)))
                if z is None:
                    return False
                m.append(z)
            if sorted(m) != list(R):
                return False
            if any(m[op(x, y)] != op(m[x], m[y]) for x in R for y in R):
                return False
            gyr[a, b] = m
    return all(gyr[op(a, b), b] == gyr[a, b] for a in R for b in R)


def brute_force_gyrogroups(n: int) -> list[tuple[tuple[int, ...], ...]]:
    """All gyrogroup tables of order n with identity 0 (tiny n only): fill
    the (n-1)^2 free cells with every possible value, keep those passing
    ``table_is_gyrogroup``."""
    free = [(i, j) for i in range(1, n) for j in range(1, n)]
    out = []
    for vals in itertools.product(range(n), repeat=len(free)):
        t = [list(range(n))] + [[i] + [0] * (n - 1) for i in range(1, n)]
        for (i, j), v in zip(free, vals):
            t[i][j] = v
        if any(len(set(row)) != n for row in t):
            continue
        if table_is_gyrogroup(t):
            out.append(tuple(tuple(r) for r in t))
    return out


def zn_table(n: int):
    return tuple(tuple((i + j) % n for j in range(n)) for i in range(n))


def normalized_latin_squares(n: int):
    """Every Latin square with first row and column 0..n-1, by backtracking."""
    t = [list(range(n))] + [[i] + [None] * (n - 1) for i in range(1, n)]
    cells = [(i, j) for i in range(1, n) for j in range(1, n)]

    def go(k):
        if k == len(cells):
            yield tuple(tuple(r) for r in t)
            return
        i, j = cells[k]
        row = set(t[i][:j])
        col = {t[r][j] for r in range(i)}
        for v in range(n):
            if v not in row and v not in col:
                t[i][j] = v
                yield from go(k + 1)
        t[i][j] = None

    yield from go(0)
