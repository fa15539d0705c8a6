"""Exact values carrying a symbolic infinitesimal part.

A :class:`LexCost` stands for ``base + sum_s coef_s * eps_s`` where the
``eps_s`` (``s = 1, 2, ...``) are positive infinitesimals with
``eps_1 >> eps_2 >> ...``.  Comparing two such values is the same as comparing
them after substituting ``eps_s = x**s`` for every small enough ``x > 0``:
the base decides first, then the coefficient of the smallest rank on which the
two values differ.

Rationals are plain :class:`fractions.Fraction` objects.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping, Union

Scalar = Union[int, Fraction]


def _merge(a: tuple, b: tuple, sign: int = 1) -> tuple:
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        ra, ca = a[i]
        rb, cb = b[j]
        if ra < rb:
            out.append(a[i])
            i += 1
        elif rb < ra:
            out.append((rb, cb if sign > 0 else -cb))
            j += 1
        else:
            c = ca + cb if sign > 0 else ca - cb
            if c:
                out.append((ra, c))
            i += 1
            j += 1
    out.extend(a[i:])
    if sign > 0:
        out.extend(b[j:])
    else:
        out.extend((r, -c) for r, c in b[j:])
    return tuple(out)


class LexCost:
    """Immutable ``base + sum(coef * eps_rank)`` with exact rational parts."""

    __slots__ = ("_base", "_pert")

    def __init__(self, base: Scalar = 0, pert: Union[Mapping[int, Scalar], Iterable, None] = None):
        self._base = Fraction(base)
        acc: dict[int, Fraction] = {}
        if pert:
            items = pert.items() if isinstance(pert, Mapping) else pert
            for rank, coef in items:
                rank = int(rank)
                if rank < 1:
                    raise ValueError(f"perturbation ranks start at 1, got {rank}")
                acc[rank] = acc.get(rank, 0) + Fraction(coef)
        self._pert = tuple((r, c) for r, c in sorted(acc.items()) if c)

    @classmethod
    def _raw(cls, base: Fraction, pert: tuple) -> "LexCost":
        obj = cls.__new__(cls)
        obj._base = base
        obj._pert = pert
        return obj

    @classmethod
    def eps(cls, rank: int, coef: Scalar = 1) -> "LexCost":
        """The pure infinitesimal ``coef * eps_rank``."""
        return cls(0, {rank: coef})

    @property
    def base(self) -> Fraction:
        return self._base

    @property
    def pert(self) -> dict[int, Fraction]:
        return dict(self._pert)

    @property
    def pert_items(self) -> tuple:
        """Nonzero ``(rank, coef)`` pairs in increasing rank order."""
        return self._pert

    def is_real(self) -> bool:
        return not self._pert

    def sign(self) -> int:
        if self._base:
            return 1 if self._base > 0 else -1
        if self._pert:
            return 1 if self._pert[0][1] > 0 else -1
        return 0

    def eval_at(self, x: Scalar) -> Fraction:
        """Value after substituting ``eps_s = x**s``."""
        x = Fraction(x)
        return self._base + sum((c * x**r for r, c in self._pert), Fraction(0))

    def __add__(self, other):
        if isinstance(other, LexCost):
            return LexCost._raw(self._base + other._base, _merge(self._pert, other._pert))
        if isinstance(other, (int, Fraction)):
            return LexCost._raw(self._base + other, self._pert)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return LexCost._raw(-self._base, tuple((r, -c) for r, c in self._pert))

    def __sub__(self, other):
        if isinstance(other, LexCost):
            return LexCost._raw(self._base - other._base, _merge(self._pert, other._pert, -1))
        if isinstance(other, (int, Fraction)):
            return LexCost._raw(self._base - other, self._pert)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, k):
        if not isinstance(k, (int, Fraction)):
            return NotImplemented
        if not k:
            return LEX_ZERO
        return LexCost._raw(self._base * k, tuple((r, c * k) for r, c in self._pert))

    __rmul__ = __mul__

    def __truediv__(self, k):
        if not isinstance(k, (int, Fraction)):
            return NotImplemented
        return self * (1 / Fraction(k))

    def __eq__(self, other):
        if isinstance(other, LexCost):
            return self._base == other._base and self._pert == other._pert
        if isinstance(other, (int, Fraction)):
            return not self._pert and self._base == other
        return NotImplemented

    def __hash__(self):
        if not self._pert:
            return hash(self._base)
        return hash((self._base, self._pert))

    def __lt__(self, other):
        return lex_compare(self, other) < 0

    def __le__(self, other):
        return lex_compare(self, other) <= 0

    def __gt__(self, other):
        return lex_compare(self, other) > 0

    def __ge__(self, other):
        return lex_compare(self, other) >= 0

    def __bool__(self):
        return bool(self._base) or bool(self._pert)

    def __repr__(self):
        if not self._pert:
            return f"LexCost({self._base})"
        terms = ", ".join(f"{r}: {c}" for r, c in self._pert)
        return f"LexCost({self._base}, {{{terms}}})"


LEX_ZERO = LexCost()


def as_lex(value) -> LexCost:
    if isinstance(value, LexCost):
        return value
    return LexCost._raw(Fraction(value), ())


def lex_add(a, b) -> LexCost:
    return as_lex(a) + as_lex(b)


def lex_compare(a, b) -> int:
    """Return -1, 0 or 1 as ``a`` is less than, equal to or greater than ``b``."""
    a = as_lex(a)
    b = as_lex(b)
    if a._base != b._base:
        return -1 if a._base < b._base else 1
    pa, pb = a._pert, b._pert
    i = j = 0
    while i < len(pa) or j < len(pb):
        ra = pa[i][0] if i < len(pa) else None
        rb = pb[j][0] if j < len(pb) else None
        if rb is None or (ra is not None and ra < rb):
            return 1 if pa[i][1] > 0 else -1
        if ra is None or rb < ra:
            return -1 if pb[j][1] > 0 else 1
        ca, cb = pa[i][1], pb[j][1]
        if ca != cb:
            return -1 if ca < cb else 1
        i += 1
        j += 1
    return 0


def lex_sum(values: Iterable) -> LexCost:
    total = LEX_ZERO
    for v in values:
        total = total + v
    return total


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` (or an integer literal) into a Fraction."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError, AttributeError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


def format_rational(x: Scalar) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


class LexEmbedding:
    """Map LexCost values to Python ints, preserving order and addition.

    Each value is scaled by the common denominator of all inputs and its
    coefficients are written as balanced base-``2**shift`` digits, base part
    most significant.  Integer sums and comparisons then agree exactly with
    LexCost arithmetic as long as every coefficient of every intermediate
    quantity stays below ``2**(shift - 1)`` in absolute value; ``headroom_bits``
    leaves room for sums of up to ``2**(headroom_bits - 2)`` input values.
    """

    def __init__(self, values: Iterable, headroom_bits: int = 40):
        values = [as_lex(v) for v in values]
        scale = 1
        top = 0
        for v in values:
            scale = lcm(scale, v._base.denominator)
            for r, c in v._pert:
                scale = lcm(scale, c.denominator)
                top = max(top, r)
        biggest = 1
        for v in values:
            biggest = max(biggest, abs(v._base.numerator) * (scale // v._base.denominator))
            for _, c in v._pert:
                biggest = max(biggest, abs(c.numerator) * (scale // c.denominator))
        self.scale = scale
        self.top_rank = top
        self.shift = biggest.bit_length() + headroom_bits

    def encode(self, value) -> int:
        v = as_lex(value)
        scale, shift, top = self.scale, self.shift, self.top_rank
        num = v._base * scale
        if num.denominator != 1:
            raise ValueError("value outside the embedding's denominator")
        out = int(num) << (shift * top)
        for r, c in v._pert:
            if r > top:
                raise ValueError("value outside the embedding's rank range")
            cs = c * scale
            if cs.denominator != 1:
                raise ValueError("value outside the embedding's denominator")
            out += int(cs) << (shift * (top - r))
        return out

    def decode(self, code: int) -> LexCost:
        shift, top = self.shift, self.top_rank
        full = 1 << shift
        half = full >> 1
        digits = []
        for _ in range(top):
            d = code & (full - 1)
            if d >= half:
                d -= full
            digits.append(d)
            code = (code - d) >> shift
        digits.reverse()
        pert = {r + 1: Fraction(d, self.scale) for r, d in enumerate(digits) if d}
        return LexCost(Fraction(code, self.scale), pert)
