"""Exact algebra of generalized algebraic curvature operators.

A curvature operator ``A`` on an ``m``-dimensional space is stored densely as
``A[i, j, k, l]``, the ``e_l`` component of ``A(e_i, e_j) e_k``.  It must be
antisymmetric in ``(i, j)`` and satisfy the first Bianchi identity

    A[i,j,k,l] + A[j,k,i,l] + A[k,i,j,l] == 0.

The space of such operators splits as (Weyl part) + (symmetric Ricci) +
(antisymmetric Ricci); :func:`decompose` and :func:`recompose` move between
the two descriptions exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .exact import rank
from .rational import ONE, ZERO, Q, as_rational

__all__ = [
    "BilinearForm",
    "CurvatureOp",
    "CurvatureViolation",
    "Decomposition",
    "Violation",
    "COMPONENTS",
    "bianchi_project",
    "component_dimensions",
    "curvature_space_dimension",
    "decompose",
    "find_violation",
    "h_map",
    "random_bilinear",
    "random_curvature",
    "recompose",
    "ricci",
    "split_bilinear",
    "trace_form",
    "validate_curvature",
    "weyl_project",
]

COMPONENTS = ("weyl", "sym", "alt")

MIN_DIM = 3


def _as_array(raw, ndim: int) -> np.ndarray:
    src = np.asarray(raw, dtype=object)
    if src.ndim != ndim or len(set(src.shape)) != 1:
        raise ValueError(f"expected a cubical {ndim}-index array, got shape {src.shape}")
    out = np.empty(src.shape, dtype=object)
    for idx in np.ndindex(src.shape):
        out[idx] = as_rational(src[idx])
    out.flags.writeable = False
    return out


def _zeros(shape) -> np.ndarray:
    arr = np.empty(shape, dtype=object)
    arr.fill(ZERO)
    return arr


class _Dense:
    """Immutable dense tensor of exact rationals with elementwise linear arithmetic."""

    ndim = 0
    __slots__ = ("entries",)

    def __init__(self, entries):
        self.entries = _as_array(entries, self.ndim)

    @classmethod
    def _wrap(cls, arr: np.ndarray):
        obj = cls.__new__(cls)
        arr.flags.writeable = False
        obj.entries = arr
        return obj

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    def __getitem__(self, idx) -> Q:
        return self.entries[idx]

    def _same(self, other):
        if type(other) is not type(self):
            return None
        if other.m != self.m:
            raise ValueError(f"dimension mismatch: {self.m} vs {other.m}")
        return other

    def __add__(self, other):
        other = self._same(other)
        if other is None:
            return NotImplemented
        return type(self)._wrap(self.entries + other.entries)

    def __sub__(self, other):
        other = self._same(other)
        if other is None:
            return NotImplemented
        return type(self)._wrap(self.entries - other.entries)

    def __neg__(self):
        return type(self)._wrap(-self.entries)

    def __mul__(self, c):
        if isinstance(c, _Dense):
            return NotImplemented
        c = as_rational(c)
        return type(self)._wrap(self.entries * c)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1 / as_rational(c))

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.m == other.m and bool(np.all(self.entries == other.entries))

    def __hash__(self):
        return hash((type(self).__name__, tuple(self.entries.flat)))

    def is_zero(self) -> bool:
        return not any(self.entries.flat)

    def nonzero(self) -> dict[tuple, Q]:
        return {idx: v for idx, v in np.ndenumerate(self.entries) if v}

    def __repr__(self):
        nz = self.nonzero()
        shown = ", ".join(f"{list(k)}: {v}" for k, v in list(nz.items())[:6])
        more = ", ..." if len(nz) > 6 else ""
        return f"{type(self).__name__}(m={self.m}, {{{shown}{more}}})"


class BilinearForm(_Dense):
    """Element of V* (x) V*, entries ``theta[i, j] = theta(e_i, e_j)``."""

    ndim = 2
    __slots__ = ()

    @classmethod
    def zero(cls, m: int) -> "BilinearForm":
        return cls._wrap(_zeros((m, m)))

    @classmethod
    def unit(cls, m: int, i: int, j: int) -> "BilinearForm":
        """The basis form ``e^i (x) e^j``."""
        arr = _zeros((m, m))
        arr[i, j] = ONE
        return cls._wrap(arr)

    @property
    def T(self) -> "BilinearForm":
        return BilinearForm._wrap(self.entries.T.copy())

    def sym(self) -> "BilinearForm":
        return BilinearForm._wrap((self.entries + self.entries.T) / 2)

    def alt(self) -> "BilinearForm":
        return BilinearForm._wrap((self.entries - self.entries.T) / 2)

    def __str__(self):
        cells = [[str(v) for v in row] for row in self.entries]
        width = max(len(c) for row in cells for c in row)
        return "\n".join("[" + " ".join(c.rjust(width) for c in row) + "]" for row in cells)

    def is_symmetric(self) -> bool:
        return bool(np.all(self.entries == self.entries.T))

    def is_antisymmetric(self) -> bool:
        return bool(np.all(self.entries == -self.entries.T))


@dataclass(frozen=True)
class Violation:
    identity: str  # "shape", "antisymmetry" or "first-bianchi"
    index: tuple
    value: Q

    def describe(self) -> str:
        where = ",".join(str(i + 1) for i in self.index)
        return f"{self.identity} fails at ({where}) with residual {self.value}"


class CurvatureViolation(ValueError):
    def __init__(self, violation: Violation):
        super().__init__(violation.describe())
        self.violation = violation


def _cyclic(arr: np.ndarray) -> np.ndarray:
    # S[i,j,k,l] = A[i,j,k,l] + A[j,k,i,l] + A[k,i,j,l]
    return arr + np.einsum("jkil->ijkl", arr) + np.einsum("kijl->ijkl", arr)


def find_violation(entries: np.ndarray) -> Violation | None:
    """First index tuple breaking antisymmetry, then the first Bianchi identity."""
    for identity, residual in (("antisymmetry", entries + np.einsum("jikl->ijkl", entries)),
                               ("first-bianchi", _cyclic(entries))):
        if any(residual.flat):
            idx = next(i for i, v in np.ndenumerate(residual) if v)
            return Violation(identity, idx, residual[idx])
    return None


class CurvatureOp(_Dense):
    """A generalized algebraic curvature operator; validated on construction."""

    ndim = 4
    __slots__ = ()

    def __init__(self, entries):
        super().__init__(entries)
        if self.m < MIN_DIM:
            raise ValueError(f"dimension must be at least {MIN_DIM}, got {self.m}")
        bad = find_violation(self.entries)
        if bad is not None:
            raise CurvatureViolation(bad)

    @classmethod
    def zero(cls, m: int) -> "CurvatureOp":
        if m < MIN_DIM:
            raise ValueError(f"dimension must be at least {MIN_DIM}, got {m}")
        return cls._wrap(_zeros((m,) * 4))

    def apply(self, x, y, z) -> np.ndarray:
        """Components of ``A(x, y) z`` for coordinate vectors x, y, z."""
        return np.einsum("i,j,k,ijkl->l", np.asarray(x, dtype=object),
                         np.asarray(y, dtype=object), np.asarray(z, dtype=object),
                         self.entries)


def validate_curvature(m: int, raw) -> CurvatureOp:
    """Return ``raw`` as a CurvatureOp, raising CurvatureViolation if it is not one."""
    if m < MIN_DIM:
        raise ValueError(f"dimension must be at least {MIN_DIM}, got {m}")
    if np.shape(raw) != (m,) * 4:
        raise ValueError(f"expected shape {(m,) * 4}, got {np.shape(raw)}")
    return CurvatureOp(raw)


def bianchi_project(raw) -> CurvatureOp:
    """Project a tensor antisymmetric in its first two slots onto curvature operators.

    Uses ``A - S(A)/3`` where ``S`` is the cyclic sum over the first three
    slots; the result satisfies both identities and operators are fixed.
    """
    arr = _as_array(raw.entries if isinstance(raw, _Dense) else raw, 4)
    if arr.shape[0] < MIN_DIM:
        raise ValueError(f"dimension must be at least {MIN_DIM}, got {arr.shape[0]}")
    anti = arr + np.einsum("jikl->ijkl", arr)
    if any(anti.flat):
        idx = next(i for i, v in np.ndenumerate(anti) if v)
        raise CurvatureViolation(Violation("antisymmetry", idx, anti[idx]))
    return CurvatureOp(arr - _cyclic(arr) / 3)


def ricci(A: CurvatureOp) -> BilinearForm:
    """``rho[j, k] = sum_i A[i, j, k, i]``."""
    return BilinearForm._wrap(np.einsum("ijki->jk", A.entries))


def trace_form(A: CurvatureOp) -> BilinearForm:
    """``Tr A(e_i, e_j)``, i.e. ``sum_k A[i, j, k, k]``."""
    return BilinearForm._wrap(np.einsum("ijkk->ij", A.entries))


def split_bilinear(theta: BilinearForm) -> tuple[BilinearForm, BilinearForm]:
    return theta.sym(), theta.alt()


def _h_entries(theta, m: int, zero):
    # H[i,j,k,l] = (t[i,j] - t[j,i]) d_kl + t[i,k] d_jl - t[j,k] d_il
    out = np.empty((m,) * 4, dtype=object)
    out.fill(zero)
    for i, j, k in itertools.product(range(m), repeat=3):
        w = theta[i][j] - theta[j][i]
        out[i, j, k, k] = out[i, j, k, k] + w
        out[i, j, k, j] = out[i, j, k, j] + theta[i][k]
        out[i, j, k, i] = out[i, j, k, i] - theta[j][k]
    return out


def h_map(theta: BilinearForm) -> CurvatureOp:
    """Curvature operator ``H(theta)(x,y)z = t(x,y)z - t(y,x)z + t(x,z)y - t(y,z)x``."""
    m = theta.m
    if m < MIN_DIM:
        raise ValueError(f"dimension must be at least {MIN_DIM}, got {m}")
    return CurvatureOp._wrap(_h_entries(theta.entries, m, ZERO))


def weyl_project(A: CurvatureOp) -> CurvatureOp:
    """Projection onto the Ricci-free (Weyl projective) operators."""
    m = A.m
    rho = ricci(A)
    return A + h_map(rho.sym()) / (m - 1) + h_map(rho.alt()) / (m + 1)


class Decomposition(NamedTuple):
    weyl: CurvatureOp
    ricci_sym: BilinearForm
    ricci_alt: BilinearForm


def decompose(A: CurvatureOp) -> Decomposition:
    rho = ricci(A)
    return Decomposition(weyl_project(A), rho.sym(), rho.alt())


def recompose(weyl: CurvatureOp, ricci_sym: BilinearForm, ricci_alt: BilinearForm) -> CurvatureOp:
    """Inverse of :func:`decompose`."""
    m = weyl.m
    return weyl - h_map(ricci_sym) / (m - 1) - h_map(ricci_alt) / (m + 1)


# -- dimension counts -------------------------------------------------------

def _spanning_set(m: int) -> Iterable[CurvatureOp]:
    """Images of the basis of Lambda^2 V* (x) V* (x) V under the Bianchi projector."""
    for i, j in itertools.combinations(range(m), 2):
        for k, l in itertools.product(range(m), repeat=2):
            raw = _zeros((m,) * 4)
            raw[i, j, k, l] = ONE
            raw[j, i, k, l] = -ONE
            yield bianchi_project(raw)


def _flat(arr: np.ndarray) -> dict[int, Q]:
    return {n: v for n, v in enumerate(arr.flat) if v}


def curvature_space_dimension(m: int) -> int:
    """Dimension of the solution space of both identities on ``m**4`` unknowns."""
    idx = {t: n for n, t in enumerate(itertools.product(range(m), repeat=4))}
    rows = []
    for i, j, k, l in itertools.product(range(m), repeat=4):
        row: dict[int, Q] = {}
        for t in ((i, j, k, l), (j, i, k, l)):
            row[idx[t]] = row.get(idx[t], 0) + 1
        rows.append(row)
        row = {}
        for t in ((i, j, k, l), (j, k, i, l), (k, i, j, l)):
            row[idx[t]] = row.get(idx[t], 0) + 1
        rows.append(row)
    return len(idx) - rank(rows)


def component_dimensions(m: int) -> tuple[int, int, int, int]:
    """``(dim Weyl, dim S^2, dim Lambda^2, total)``, cross-checked by projector ranks.

    Raises AssertionError if a closed-form count disagrees with the exact
    rank of the corresponding projector on a spanning set.
    """
    if m < MIN_DIM:
        raise ValueError(f"dimension must be at least {MIN_DIM}, got {m}")
    formula = (m * m * (m * m - 4) // 3, m * (m + 1) // 2, m * (m - 1) // 2)
    span = list(_spanning_set(m))
    ranks = (
        rank(_flat(weyl_project(A).entries) for A in span),
        rank(_flat(ricci(A).sym().entries) for A in span),
        rank(_flat(ricci(A).alt().entries) for A in span),
    )
    total = rank(_flat(A.entries) for A in span)
    if formula != ranks or total != sum(formula):
        raise AssertionError(f"m={m}: formula {formula} vs ranks {ranks}, total {total}")
    return (*formula, total)


# -- random generation ------------------------------------------------------

def _normalize_mask(mask) -> frozenset:
    if mask is None:
        return frozenset()
    mask = frozenset(mask)
    unknown = mask - set(COMPONENTS)
    if unknown:
        raise ValueError(f"unknown component(s) {sorted(unknown)}; use {COMPONENTS}")
    return mask


def random_bilinear(seed, m: int, kind: str = "any", bound: int = 3) -> BilinearForm:
    """Seeded small-integer bilinear form; ``kind`` is 'any', 'sym' or 'alt'.

    Re-draws until the result is nonzero.
    """
    rng = np.random.default_rng(seed)
    while True:
        raw = rng.integers(-bound, bound + 1, size=(m, m)).astype(object)
        theta = BilinearForm(raw)
        if kind == "sym":
            theta = theta.sym()
        elif kind == "alt":
            theta = theta.alt()
        elif kind != "any":
            raise ValueError(f"unknown kind {kind!r}")
        if not theta.is_zero():
            return theta


def random_curvature(seed, m: int, mask=COMPONENTS, bound: int = 3,
                     max_tries: int = 32) -> CurvatureOp:
    """Seeded curvature operator whose nonzero components are exactly ``mask``.

    ``mask`` is a subset of ``{"weyl", "sym", "alt"}``.
    """
    mask = _normalize_mask(mask)
    if m < MIN_DIM:
        raise ValueError(f"dimension must be at least {MIN_DIM}, got {m}")
    if not mask:
        return CurvatureOp.zero(m)
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        raw = rng.integers(-bound, bound + 1, size=(m,) * 4).astype(object)
        raw = raw - np.einsum("jikl->ijkl", raw)
        parts = decompose(bianchi_project(raw))
        kept = Decomposition(
            parts.weyl if "weyl" in mask else CurvatureOp.zero(m),
            parts.ricci_sym if "sym" in mask else BilinearForm.zero(m),
            parts.ricci_alt if "alt" in mask else BilinearForm.zero(m),
        )
        if all(not getattr(kept, f).is_zero()
               for f, name in zip(Decomposition._fields, COMPONENTS) if name in mask):
            return recompose(*kept)
    raise RuntimeError(f"no nondegenerate draw for mask {sorted(mask)} after {max_tries} tries")
