"""Truncated multivariate polynomials ("jets") over the rationals.

A :class:`Jet` in ``m`` variables of order ``D`` is a polynomial whose terms of
total degree greater than ``D`` have been discarded.  Coefficients above the
order are *unknown*, not zero, so every jet carries the order through which
it can be trusted.  Arithmetic between jets of different orders yields a jet
of the smaller order, and differentiation lowers the order by one::

    >>> z1, z2 = Jet.var(2, 3, 0), Jet.var(2, 3, 1)
    >>> (1 + z1) * (1 - z1)
    Jet(m=2, order=3: 1 - z1^2)
    >>> (z1 * z2).antider(1)
    Jet(m=2, order=3: 1/2*z1*z2^2)
    >>> (z1 ** 3).partial(0).order
    2

Variables are indexed from 0.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from operator import add
from numbers import Rational
from typing import Iterable, Iterator, Sequence

from .rational import ONE, Q, ZERO, as_rational, format_rational, parse_rational

__all__ = [
    "Jet",
    "Exponent",
    "accumulate",
    "vanishing_order",
    "first_nonzero",
]

Exponent = tuple[int, ...]

DEFAULT_ORDER = 6


class Jet:
    """Polynomial in ``m`` variables truncated above total degree ``order``."""

    __slots__ = ("m", "order", "_terms", "_graded")

    def __init__(self, m: int, order: int, terms=None):
        if m < 1:
            raise ValueError("a jet needs at least one variable")
        if order < 0:
            raise ValueError(f"negative jet order {order}")
        self.m = m
        self.order = order
        clean: dict[Exponent, Q] = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for exps, coeff in items:
                exps = tuple(int(e) for e in exps)
                if len(exps) != m or min(exps) < 0:
                    raise ValueError(f"bad exponent {exps} for m={m}")
                if sum(exps) > order:
                    continue
                coeff = as_rational(coeff)
                if coeff:
                    clean[exps] = clean.get(exps, 0) + coeff
                    if not clean[exps]:
                        del clean[exps]
        self._terms = clean
        self._graded = None

    @classmethod
    def _raw(cls, m: int, order: int, terms: dict) -> "Jet":
        # trusted constructor: terms already clean and truncated
        jet = cls.__new__(cls)
        jet.m, jet.order, jet._terms = m, order, terms
        jet._graded = None
        return jet

    @classmethod
    def zero(cls, m: int, order: int = DEFAULT_ORDER) -> "Jet":
        return cls._raw(m, order, {})

    @classmethod
    def const(cls, m: int, order: int, value) -> "Jet":
        value = as_rational(value)
        return cls._raw(m, order, {(0,) * m: value} if value else {})

    @classmethod
    def var(cls, m: int, order: int, k: int) -> "Jet":
        if not 0 <= k < m:
            raise IndexError(f"variable index {k} out of range for m={m}")
        if order < 1:
            return cls.zero(m, order)
        exps = tuple(1 if i == k else 0 for i in range(m))
        return cls._raw(m, order, {exps: ONE})

    @classmethod
    def monomial(cls, m: int, order: int, exps: Sequence[int], coeff=1) -> "Jet":
        return cls(m, order, {tuple(exps): coeff})

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self) -> dict[Exponent, Q]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Exponent, Q]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, exps: Sequence[int]) -> Q:
        return self._terms.get(tuple(exps), ZERO)

    def lowest_degree(self) -> float:
        """Smallest total degree carrying a nonzero coefficient; ``inf`` for 0."""
        if not self._terms:
            return math.inf
        return min(sum(e) for e in self._terms)

    def degree(self) -> float:
        if not self._terms:
            return -math.inf
        return max(sum(e) for e in self._terms)

    def homogeneous_part(self, d: int) -> "Jet":
        return Jet._raw(self.m, self.order,
                        {e: c for e, c in self._terms.items() if sum(e) == d})

    def truncate(self, order: int) -> "Jet":
        if order >= self.order:
            return self
        return Jet._raw(self.m, order,
                        {e: c for e, c in self._terms.items() if sum(e) <= order})

    def with_order(self, order: int) -> "Jet":
        """Re-label the trusted order; only lowering truncates."""
        if order <= self.order:
            return self.truncate(order)
        return Jet._raw(self.m, order, dict(self._terms))

    def eval(self, point: Sequence) -> Q:
        if len(point) != self.m:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.m}")
        point = [as_rational(p) for p in point]
        total = ZERO
        for exps, coeff in self._terms.items():
            term = coeff
            for p, e in zip(point, exps):
                if e:
                    term *= p ** e
            total += term
        return total

    def __call__(self, *point) -> Q:
        if len(point) == 1 and isinstance(point[0], (list, tuple)):
            point = point[0]
        return self.eval(point)

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "Jet") -> int:
        if other.m != self.m:
            raise ValueError(f"jets in {self.m} and {other.m} variables cannot be combined")
        return min(self.order, other.order)

    def _coerce(self, other) -> "Jet | None":
        if isinstance(other, Jet):
            return other
        if isinstance(other, (int, Rational)):
            return Jet.const(self.m, self.order, other)
        return None

    def __add__(self, other) -> "Jet":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        order = self._check(other)
        terms = {e: c for e, c in self._terms.items() if sum(e) <= order}
        for e, c in other._terms.items():
            if sum(e) > order:
                continue
            v = terms.get(e, 0) + c
            if v:
                terms[e] = v
            else:
                terms.pop(e, None)
        return Jet._raw(self.m, order, terms)

    __radd__ = __add__

    def __neg__(self) -> "Jet":
        return Jet._raw(self.m, self.order, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "Jet":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Jet":
        return (-self) + other

    def scale(self, c) -> "Jet":
        c = as_rational(c)
        if not c:
            return Jet._raw(self.m, self.order, {})
        return Jet._raw(self.m, self.order, {e: c * v for e, v in self._terms.items()})

    def __mul__(self, other) -> "Jet":
        if isinstance(other, Jet):
            order = self._check(other)
            acc: dict[Exponent, Q] = {}
            _mul_into(acc, self, other, order, 1)
            return Jet._raw(self.m, order, acc)
        if isinstance(other, (int, Rational)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, c) -> "Jet":
        if isinstance(c, Jet):
            return NotImplemented
        return self.scale(1 / as_rational(c))

    def __pow__(self, n: int) -> "Jet":
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = Jet.const(self.m, self.order, 1)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Jet):
            return self.m == other.m and self.order == other.order and self._terms == other._terms
        if isinstance(other, (int, Rational)):
            return self._terms == Jet.const(self.m, self.order, other)._terms
        return NotImplemented

    def __hash__(self):
        return hash((self.m, self.order, frozenset(self._terms.items())))

    # -- calculus -----------------------------------------------------------

    def partial(self, k: int) -> "Jet":
        """Formal derivative in variable ``k``; the result is trusted to ``order - 1``."""
        if not 0 <= k < self.m:
            raise IndexError(f"variable index {k} out of range for m={self.m}")
        terms = {}
        for exps, coeff in self._terms.items():
            d = exps[k]
            if d:
                new = exps[:k] + (d - 1,) + exps[k + 1:]
                terms[new] = coeff * d
        return Jet._raw(self.m, max(self.order - 1, 0), terms)

    def antider(self, k: int) -> "Jet":
        """Integral along the ray in variable ``k``: ``z_k * int_0^1 a(.., t z_k, ..) dt``.

        A monomial with exponent ``d`` in ``z_k`` is multiplied by ``z_k/(d+1)``.
        Terms pushed above the order are dropped.
        """
        if not 0 <= k < self.m:
            raise IndexError(f"variable index {k} out of range for m={self.m}")
        terms = {}
        for exps, coeff in self._terms.items():
            if sum(exps) + 1 > self.order:
                continue
            d = exps[k]
            terms[exps[:k] + (d + 1,) + exps[k + 1:]] = coeff / (d + 1)
        return Jet._raw(self.m, self.order, terms)

    # -- (de)serialization --------------------------------------------------

    def terms_json(self) -> list[dict]:
        return [{"exps": list(e), "v": format_rational(c)}
                for e, c in sorted(self._terms.items(), key=_term_sort_key)]

    def to_json(self) -> dict:
        return {"m": self.m, "order": self.order, "terms": self.terms_json()}

    @classmethod
    def from_terms_json(cls, m: int, order: int, terms: Iterable[dict]) -> "Jet":
        parsed = {}
        for n, term in enumerate(terms):
            try:
                exps = tuple(term["exps"])
                value = parse_rational(str(term["v"]))
            except (KeyError, TypeError) as exc:
                raise ValueError(f"terms[{n}]: expected {{'exps': [...], 'v': 'p/q'}}") from exc
            if exps in parsed:
                raise ValueError(f"terms[{n}]: duplicate exponent {list(exps)}")
            parsed[exps] = value
        return cls(m, order, parsed)

    @classmethod
    def from_json(cls, data: dict) -> "Jet":
        return cls.from_terms_json(int(data["m"]), int(data["order"]), data["terms"])

    # -- display ------------------------------------------------------------

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for exps, coeff in sorted(self._terms.items(), key=_term_sort_key):
            mono = "*".join(f"z{i + 1}" + (f"^{e}" if e > 1 else "")
                            for i, e in enumerate(exps) if e)
            mag = abs(coeff)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            sign = "-" if coeff < 0 else "+"
            parts.append((sign, body))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"Jet(m={self.m}, order={self.order}: {self})"


def _term_sort_key(item):
    exps = item[0]
    return (sum(exps), tuple(-e for e in exps))


def _graded_terms(jet: Jet):
    # (degrees, terms) sorted by total degree, cached on the immutable jet
    if jet._graded is None:
        terms = sorted(((sum(e), e, c) for e, c in jet._terms.items()), key=lambda t: t[0])
        jet._graded = ([t[0] for t in terms], terms)
    return jet._graded


def _mul_into(acc: dict, a: Jet, b: Jet, order: int, coeff) -> None:
    """``acc += coeff * a * b`` truncated above ``order``."""
    if not a._terms or not b._terms or not coeff:
        return
    a_deg, a_terms = _graded_terms(a)
    b_deg, b_terms = _graded_terms(b)
    if a_deg[0] + b_deg[0] > order:
        return
    for da, ea, ca in a_terms:
        room = order - da
        if room < b_deg[0]:
            break
        ca = ca * coeff
        for _, eb, cb in b_terms[:bisect_right(b_deg, room)]:
            e = tuple(map(add, ea, eb))
            v = acc.get(e, 0) + ca * cb
            if v:
                acc[e] = v
            else:
                del acc[e]


def accumulate(m: int, order: int, linear=(), products=()) -> Jet:
    """Sum ``c*a`` over ``linear`` and ``c*a*b`` over ``products`` into one jet.

    ``linear`` holds ``(c, a)`` pairs and ``products`` holds ``(c, a, b)``
    triples.  Everything is truncated to ``order``, which the caller sets to
    the minimum trusted order of the inputs.
    """
    acc: dict[Exponent, Q] = {}
    for c, a in linear:
        if a.m != m:
            raise ValueError("variable count mismatch")
        if not c:
            continue
        for e, v in a._terms.items():
            if sum(e) > order:
                continue
            w = acc.get(e, 0) + c * v
            if w:
                acc[e] = w
            else:
                acc.pop(e, None)
    for c, a, b in products:
        if a.m != m or b.m != m:
            raise ValueError("variable count mismatch")
        _mul_into(acc, a, b, order, c)
    return Jet._raw(m, order, acc)


def vanishing_order(jets: Iterable[Jet], cap: int) -> int:
    """Largest ``k <= cap`` with every coefficient of degree ``<= k`` zero.

    Returns ``-1`` when some jet has a nonzero constant term.
    """
    low = math.inf
    for jet in jets:
        low = min(low, jet.lowest_degree())
    if low == math.inf:
        return cap
    return int(min(low - 1, cap))


def first_nonzero(indexed: Iterable[tuple[tuple, Jet]], through: int | None = None):
    """First ``(index, exps, value)`` of lowest degree among indexed jets, or None.

    Only coefficients of degree ``<= through`` are considered when given.
    """
    best = None
    for index, jet in indexed:
        for exps, coeff in jet.items():
            deg = sum(exps)
            if through is not None and deg > through:
                continue
            key = (deg, tuple(index), _term_sort_key((exps, coeff)))
            if best is None or key < best[0]:
                best = (key, (tuple(index), exps, coeff))
    return None if best is None else best[1]
