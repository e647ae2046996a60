"""Torsion-free connections on a coordinate ball, with jet Christoffel symbols.

Index conventions (0-based):

* ``gamma[i, j, k]`` is the ``d_k`` component of ``nabla_{d_i} d_j``; it is
  symmetric in ``(i, j)``.
* ``R[i, j, k, l]`` is the ``d_l`` component of ``R(d_i, d_j) d_k``::

      R[i,j,k,l] = d_i G[j,k,l] - d_j G[i,k,l] + G[i,n,l] G[j,k,n] - G[j,n,l] G[i,k,n]

* ``nabla R[i, j, k, l, s]`` is ``(nabla_{d_s} R)[i, j, k, l]``: one ``+G[s,n,l]``
  term for the upper index and one ``-G[s,a,n]`` term for each lower index ``a``.

Every derived field is trusted only through the order of its jets: curvature of
an order-``D`` connection through ``D-1``, its covariant derivative through
``D-2``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .algebra import MIN_DIM, BilinearForm, CurvatureOp, _h_entries
from .jets import Jet, accumulate, first_nonzero, vanishing_order
from .rational import as_rational

__all__ = [
    "BilinearField",
    "Connection",
    "CurvatureField",
    "JetTensor",
    "NotClosedError",
    "OneFormField",
    "TwoFormField",
    "Witness",
    "covariant_derivative_curvature",
    "covariant_derivative_two_form",
    "curvature",
    "d_one_form",
    "h_field",
    "projective_perturb",
    "random_connection",
    "random_one_form",
    "ricci_field",
    "second_bianchi_residual",
    "trace_one_form",
    "trace_two_form",
    "volume_potential",
    "weyl_project_field",
]


@dataclass(frozen=True)
class Witness:
    """A nonzero jet coefficient: entry ``index``, monomial ``exps``, ``value``."""

    index: tuple
    exps: tuple
    value: object

    @property
    def degree(self) -> int:
        return sum(self.exps)

    def to_json(self) -> dict:
        from .rational import format_rational
        return {"index": [i + 1 for i in self.index], "exps": list(self.exps),
                "v": format_rational(self.value)}

    def __str__(self):
        where = ",".join(str(i + 1) for i in self.index)
        mono = "*".join(f"z{i + 1}^{e}" for i, e in enumerate(self.exps) if e) or "1"
        return f"[{where}] coefficient of {mono} is {self.value}"


class JetTensor:
    """Dense array of jets in ``m`` variables sharing one trusted order."""

    ndim = None

    def __init__(self, entries: np.ndarray, m: int | None = None):
        arr = np.asarray(entries, dtype=object)
        if self.ndim is not None and arr.ndim != self.ndim:
            raise ValueError(f"{type(self).__name__} needs {self.ndim} indices, got {arr.ndim}")
        if arr.size == 0:
            raise ValueError("empty jet tensor")
        first = arr.flat[0]
        if m is None:
            m = first.m
        if any(len(set(arr.shape)) != 1 or s != m for s in arr.shape):
            raise ValueError(f"expected every index to range over {m}, got shape {arr.shape}")
        orders = {jet.order for jet in arr.flat}
        if {jet.m for jet in arr.flat} != {m}:
            raise ValueError("entries must be jets in m variables")
        if len(orders) > 1:
            low = min(orders)
            arr = _map(lambda jet: jet.truncate(low), arr)
        arr.flags.writeable = False
        self.m = m
        self.entries = arr

    @property
    def valid_order(self) -> int:
        return self.entries.flat[0].order

    def __getitem__(self, idx) -> Jet:
        return self.entries[idx]

    def indexed(self):
        return np.ndenumerate(self.entries)

    def at(self, point) -> np.ndarray:
        point = [as_rational(p) for p in point]
        return _map(lambda jet: jet.eval(point), self.entries)

    def at_origin(self) -> np.ndarray:
        return self.at([0] * self.m)

    def homogeneous_part(self, d: int):
        return type(self)(_map(lambda jet: jet.homogeneous_part(d), self.entries), self.m)

    def vanishes_through(self, cap: int | None = None) -> int:
        """Largest degree ``k`` with all coefficients of degree ``<= k`` zero (``-1`` if none)."""
        cap = self.valid_order if cap is None else min(cap, self.valid_order)
        return vanishing_order(self.entries.flat, cap)

    def is_zero_through(self, k: int) -> bool:
        return self.vanishes_through(k) >= k

    def first_nonzero(self, through: int | None = None) -> Witness | None:
        hit = first_nonzero(self.indexed(), through)
        return None if hit is None else Witness(*hit)

    def _combine(self, other, sign):
        # mixing a subclass with its base (two-form and bilinear field) gives the base
        if isinstance(other, type(self)):
            cls = type(self)
        elif isinstance(self, type(other)):
            cls = type(other)
        else:
            return NotImplemented
        if other.m != self.m:
            raise ValueError(f"dimension mismatch: {self.m} vs {other.m}")
        return cls(self.entries + sign * other.entries, self.m)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return type(self)(-self.entries, self.m)

    def __mul__(self, c):
        c = as_rational(c)
        return type(self)(_map(lambda jet: jet.scale(c), self.entries), self.m)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1 / as_rational(c))

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.m == other.m and all(a == b for a, b in zip(self.entries.flat, other.entries.flat))

    __hash__ = None

    def __repr__(self):
        nz = sum(1 for jet in self.entries.flat if jet)
        return f"{type(self).__name__}(m={self.m}, valid_order={self.valid_order}, nonzero_entries={nz})"


def _map(fn, arr: np.ndarray) -> np.ndarray:
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        out[idx] = fn(arr[idx])
    return out


def _zero_array(shape, m: int, order: int) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    zero = Jet.zero(m, order)
    for idx in np.ndindex(shape):
        out[idx] = zero
    return out


class OneFormField(JetTensor):
    """``theta = sum_i theta[i] dz_i``."""

    ndim = 1

    @classmethod
    def from_bilinear(cls, theta: BilinearForm, order: int) -> "OneFormField":
        """``theta_j = sum_i z_i Theta[i, j]``."""
        m = theta.m
        z = [Jet.var(m, order, i) for i in range(m)]
        entries = np.empty(m, dtype=object)
        for j in range(m):
            entries[j] = accumulate(m, order, [(theta[i, j], z[i]) for i in range(m)])
        return cls(entries, m)

    @classmethod
    def zero(cls, m: int, order: int) -> "OneFormField":
        return cls(_zero_array((m,), m, order), m)


class BilinearField(JetTensor):
    """Field of bilinear forms, ``entries[i, j]`` a jet."""

    ndim = 2

    def at(self, point) -> BilinearForm:
        return BilinearForm(super().at(point))

    def at_origin(self) -> BilinearForm:
        return self.at([0] * self.m)

    @property
    def T(self):
        return type(self)(self.entries.T.copy(), self.m)

    def sym(self) -> "BilinearField":
        return BilinearField((self.entries + self.entries.T) / 2, self.m)

    def alt(self) -> "BilinearField":
        return BilinearField((self.entries - self.entries.T) / 2, self.m)

    @classmethod
    def constant(cls, theta: BilinearForm, order: int) -> "BilinearField":
        m = theta.m
        return cls(_map(lambda v: Jet.const(m, order, v), theta.entries), m)


class TwoFormField(BilinearField):
    """Antisymmetric field ``omega[i, j] = -omega[j, i]``."""

    def __init__(self, entries, m=None):
        super().__init__(entries, m)
        for i, j in itertools.combinations_with_replacement(range(self.m), 2):
            if self.entries[i, j] != -self.entries[j, i]:
                raise ValueError(f"two-form not antisymmetric at ({i + 1},{j + 1})")


class CurvatureField(JetTensor):
    """Curvature tensor field ``R[i, j, k, l]`` trusted through ``valid_order``."""

    ndim = 4

    def at(self, point) -> CurvatureOp:
        return CurvatureOp(super().at(point))

    def at_origin(self) -> CurvatureOp:
        return self.at([0] * self.m)

    def bianchi_defect(self) -> "JetTensor":
        """Cyclic sum over the first three slots; zero for every genuine curvature."""
        e = self.entries
        # (jkil) and (kijl) rotations of the first three slots
        return JetTensor(e + e.transpose(2, 0, 1, 3) + e.transpose(1, 2, 0, 3), self.m)

    def antisymmetry_defect(self) -> "JetTensor":
        return JetTensor(self.entries + self.entries.transpose(1, 0, 2, 3), self.m)


class Connection:
    """Torsion-free connection with Christoffel symbols ``gamma[i, j, k]``."""

    def __init__(self, gamma):
        arr = np.asarray(gamma, dtype=object)
        if arr.ndim != 3 or len(set(arr.shape)) != 1:
            raise ValueError(f"Christoffel array must be m x m x m, got {arr.shape}")
        m = arr.shape[0]
        if m < MIN_DIM:
            raise ValueError(f"dimension must be at least {MIN_DIM}, got {m}")
        if {jet.m for jet in arr.flat} != {m}:
            raise ValueError("Christoffel symbols must be jets in m variables")
        orders = {jet.order for jet in arr.flat}
        if len(orders) != 1:
            raise ValueError(f"Christoffel symbols have mixed orders {sorted(orders)}")
        for i, j in itertools.combinations(range(m), 2):
            for k in range(m):
                if arr[i, j, k] != arr[j, i, k]:
                    raise ValueError(f"torsion: gamma[{i + 1},{j + 1},{k + 1}] != gamma[{j + 1},{i + 1},{k + 1}]")
        arr = arr.copy()
        arr.flags.writeable = False
        self.gamma = arr
        self.m = m
        self.order = orders.pop()

    @classmethod
    def flat(cls, m: int, order: int) -> "Connection":
        return cls(_zero_array((m,) * 3, m, order))

    @classmethod
    def from_symbols(cls, m: int, order: int, symbols: dict) -> "Connection":
        """Build from ``{(i, j, k): jet}`` with ``i <= j``; missing entries are zero."""
        arr = _zero_array((m,) * 3, m, order)
        for (i, j, k), jet in symbols.items():
            if isinstance(jet, Jet):
                jet = jet.with_order(order)
            else:
                jet = Jet.const(m, order, jet)
            arr[i, j, k] = jet
            arr[j, i, k] = jet
        return cls(arr)

    def __add__(self, other: "Connection") -> "Connection":
        """Sum of Christoffel symbols (not a connection operation, but handy for layering)."""
        if not isinstance(other, Connection):
            return NotImplemented
        return Connection(self.gamma + other.gamma)

    def symbols(self):
        """Nonzero ``((i, j, k), jet)`` with ``i <= j``."""
        for i, j in itertools.combinations_with_replacement(range(self.m), 2):
            for k in range(self.m):
                if self.gamma[i, j, k]:
                    yield (i, j, k), self.gamma[i, j, k]

    def __eq__(self, other):
        if not isinstance(other, Connection):
            return NotImplemented
        return self.m == other.m and self.order == other.order and all(
            a == b for a, b in zip(self.gamma.flat, other.gamma.flat))

    __hash__ = None

    def __repr__(self):
        return f"Connection(m={self.m}, order={self.order}, nonzero_symbols={sum(1 for _ in self.symbols())})"


def _partials(gamma: np.ndarray, m: int) -> np.ndarray:
    # dG[s, i, j, k] = d_s gamma[i, j, k]
    out = np.empty((m,) * 4, dtype=object)
    for s in range(m):
        for idx in np.ndindex((m,) * 3):
            out[(s,) + idx] = gamma[idx].partial(s)
    return out


def curvature(nabla: Connection) -> CurvatureField:
    m, G = nabla.m, nabla.gamma
    order = max(nabla.order - 1, 0)
    dG = _partials(G, m)
    R = _zero_array((m,) * 4, m, order)
    for i, j in itertools.combinations(range(m), 2):
        for k, l in itertools.product(range(m), repeat=2):
            jet = accumulate(
                m, order,
                [(1, dG[i, j, k, l]), (-1, dG[j, i, k, l])],
                [(s, a, b) for n in range(m)
                 for s, a, b in ((1, G[i, n, l], G[j, k, n]), (-1, G[j, n, l], G[i, k, n]))
                 if a and b],
            )
            R[i, j, k, l] = jet
            R[j, i, k, l] = -jet
    return CurvatureField(R, m)


def ricci_field(Rf: CurvatureField) -> BilinearField:
    """``rho[j, k] = sum_i R[i, j, k, i]``."""
    m = Rf.m
    out = _zero_array((m, m), m, Rf.valid_order)
    for j, k in itertools.product(range(m), repeat=2):
        out[j, k] = accumulate(m, Rf.valid_order, [(1, Rf[i, j, k, i]) for i in range(m)])
    return BilinearField(out, m)


def trace_two_form(Rf: CurvatureField) -> TwoFormField:
    """``Tr[i, j] = sum_k R[i, j, k, k]``."""
    m = Rf.m
    out = _zero_array((m, m), m, Rf.valid_order)
    for i, j in itertools.product(range(m), repeat=2):
        out[i, j] = accumulate(m, Rf.valid_order, [(1, Rf[i, j, k, k]) for k in range(m)])
    return TwoFormField(out, m)


def trace_one_form(nabla: Connection) -> OneFormField:
    """``omega_i = sum_j gamma[i, j, j]``."""
    m = nabla.m
    out = np.empty(m, dtype=object)
    for i in range(m):
        out[i] = accumulate(m, nabla.order, [(1, nabla.gamma[i, j, j]) for j in range(m)])
    return OneFormField(out, m)


def d_one_form(theta: OneFormField) -> TwoFormField:
    """Exterior derivative: ``(d theta)[i, j] = d_i theta_j - d_j theta_i``."""
    m = theta.m
    order = max(theta.valid_order - 1, 0)
    out = _zero_array((m, m), m, order)
    for i, j in itertools.combinations(range(m), 2):
        jet = theta[j].partial(i) - theta[i].partial(j)
        out[i, j] = jet
        out[j, i] = -jet
    return TwoFormField(out, m)


class NotClosedError(ValueError):
    """The trace 1-form is not closed, so no parallel volume form exists."""

    def __init__(self, witness: Witness):
        super().__init__(f"d(trace form) is nonzero: {witness}")
        self.witness = witness


def volume_potential(nabla: Connection) -> Jet:
    """``Phi`` with ``Phi(0) = 0`` and ``d_i Phi = sum_k gamma[i, k, k]``.

    ``exp(Phi) dz_1 ^ ... ^ dz_m`` is then parallel.  The primitive is built
    degree by degree with the radial homotopy ``Phi_d = (1/d) sum_i z_i omega_i``,
    where ``omega_i`` runs over the degree ``d-1`` parts.  Raises
    :class:`NotClosedError` carrying the first nonzero coefficient of
    ``d omega`` when the trace form is not closed.
    """
    omega = trace_one_form(nabla)
    d_omega = d_one_form(omega)
    witness = d_omega.first_nonzero()
    if witness is not None:
        raise NotClosedError(witness)
    m, order = nabla.m, nabla.order
    z = [Jet.var(m, order, i) for i in range(m)]
    phi = Jet.zero(m, order)
    for d in range(1, order + 1):
        layer = accumulate(m, order, products=[(1, z[i], omega[i].homogeneous_part(d - 1))
                                               for i in range(m)])
        phi = phi + layer / d
    return phi


def covariant_derivative_curvature(nabla: Connection, Rf: CurvatureField | None = None) -> JetTensor:
    """``nR[i, j, k, l, s] = (nabla_s R)[i, j, k, l]``, trusted through ``valid_order - 1``."""
    if Rf is None:
        Rf = curvature(nabla)
    m = nabla.m
    out = _zero_array((m,) * 5, m, max(Rf.valid_order - 1, 0))
    for i, j in itertools.combinations(range(m), 2):
        for k, l, s in itertools.product(range(m), repeat=3):
            jet = _nabla_R(nabla.gamma, Rf, i, j, k, l, s)
            out[i, j, k, l, s] = jet
            out[j, i, k, l, s] = -jet
    return JetTensor(out, m)


def _nabla_R(G, Rf, i, j, k, l, s) -> Jet:
    m, R = Rf.m, Rf.entries
    order = max(Rf.valid_order - 1, 0)
    products = []
    for n in range(m):
        products += [(1, G[s, n, l], R[i, j, k, n]), (-1, G[s, i, n], R[n, j, k, l]),
                     (-1, G[s, j, n], R[i, n, k, l]), (-1, G[s, k, n], R[i, j, n, l])]
    return accumulate(m, order, [(1, R[i, j, k, l].partial(s))],
                      [(c, a, b) for c, a, b in products if a and b])


def second_bianchi_residual(nabla: Connection, Rf: CurvatureField | None = None) -> JetTensor:
    """Cyclic sum ``nR[i,j,k,l,s] + nR[j,s,k,l,i] + nR[s,i,k,l,j]``, indexed ``[i,j,k,l,s]``.

    The sum is totally antisymmetric in ``(i, j, s)``, so only increasing
    triples are computed and the rest filled in by sign.
    """
    if Rf is None:
        Rf = curvature(nabla)
    m, G = nabla.m, nabla.gamma
    order = max(Rf.valid_order - 1, 0)
    out = _zero_array((m,) * 5, m, order)
    for i, j, s in itertools.combinations(range(m), 3):
        for k, l in itertools.product(range(m), repeat=2):
            jet = (_nabla_R(G, Rf, i, j, k, l, s) + _nabla_R(G, Rf, j, s, k, l, i)
                   + _nabla_R(G, Rf, s, i, k, l, j))
            for perm, sign in (((i, j, s), 1), ((j, s, i), 1), ((s, i, j), 1),
                               ((j, i, s), -1), ((i, s, j), -1), ((s, j, i), -1)):
                a, b, c = perm
                out[a, b, k, l, c] = jet if sign > 0 else -jet
    return JetTensor(out, m)


def covariant_derivative_two_form(nabla: Connection, omega: BilinearField) -> JetTensor:
    """``out[i, j, s] = omega_{ij;s} = d_s omega_ij - G[s,i,n] omega_nj - G[s,j,n] omega_in``."""
    m, G = nabla.m, nabla.gamma
    order = max(min(omega.valid_order - 1, nabla.order), 0)
    out = _zero_array((m,) * 3, m, order)
    for i, j, s in itertools.product(range(m), repeat=3):
        products = [(c, a, b) for n in range(m)
                    for c, a, b in ((-1, G[s, i, n], omega[n, j]), (-1, G[s, j, n], omega[i, n]))
                    if a and b]
        out[i, j, s] = accumulate(m, order, [(1, omega[i, j].partial(s))], products)
    return JetTensor(out, m)


def h_field(theta: BilinearField) -> CurvatureField:
    """Pointwise ``H(theta)`` on a field of bilinear forms."""
    m = theta.m
    rows = [[theta[i, j] for j in range(m)] for i in range(m)]
    return CurvatureField(_h_entries(rows, m, Jet.zero(m, theta.valid_order)), m)


def weyl_project_field(Rf: CurvatureField) -> CurvatureField:
    """Pointwise projection onto the Weyl projective curvature."""
    m = Rf.m
    rho = ricci_field(Rf)
    return Rf + h_field(rho.sym()) / (m - 1) + h_field(rho.alt()) / (m + 1)


def projective_perturb(nabla: Connection, theta: OneFormField) -> Connection:
    """``gamma'[i, j, k] = gamma[i, j, k] + theta_i delta_jk + theta_j delta_ik``."""
    if theta.m != nabla.m:
        raise ValueError(f"dimension mismatch: {nabla.m} vs {theta.m}")
    m = nabla.m
    order = min(nabla.order, theta.valid_order)
    out = np.empty((m,) * 3, dtype=object)
    for i, j, k in itertools.product(range(m), repeat=3):
        linear = [(1, nabla.gamma[i, j, k])]
        if j == k:
            linear.append((1, theta[i]))
        if i == k:
            linear.append((1, theta[j]))
        out[i, j, k] = accumulate(m, order, linear)
    return Connection(out)


# -- seeded test inputs -----------------------------------------------------

def _random_jet(rng, m: int, order: int, max_degree: int, terms: int, bound: int) -> Jet:
    coeffs = {}
    for _ in range(terms):
        deg = int(rng.integers(0, max_degree + 1))
        exps = [0] * m
        for _ in range(deg):
            exps[int(rng.integers(0, m))] += 1
        coeffs[tuple(exps)] = int(rng.integers(-bound, bound + 1))
    return Jet(m, order, coeffs)


def random_connection(seed, m: int, order: int, max_degree: int = 2, terms: int = 2,
                      density: float = 0.5, bound: int = 2) -> Connection:
    """Seeded polynomial connection; each symbol is nonzero with probability ``density``."""
    rng = np.random.default_rng(seed)
    symbols = {}
    for i, j in itertools.combinations_with_replacement(range(m), 2):
        for k in range(m):
            if rng.random() < density:
                symbols[i, j, k] = _random_jet(rng, m, order, max_degree, terms, bound)
    return Connection.from_symbols(m, order, symbols)


def random_one_form(seed, m: int, order: int, max_degree: int = 2, terms: int = 2,
                    bound: int = 2) -> OneFormField:
    rng = np.random.default_rng(seed)
    return OneFormField(np.array([_random_jet(rng, m, order, max_degree, terms, bound)
                                  for _ in range(m)], dtype=object), m)
