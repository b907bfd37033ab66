"""
Taylor Jets
===========

Truncated multivariate Taylor arithmetic.

A :class:`Jet` carries every partial derivative of a field, or of an array of
fields, up to a fixed total order at one point of a chart. Coefficients are
the Taylor coefficients ``∂^α f / α!`` stored densely along the last axis in
graded-lexicographic order, so a jet with tensor shape ``(4, 4)`` holds an
array of shape ``(4, 4, N)`` with ``N = C(dim + order, order)``.

The ordering of multi-indices inside a degree block does not depend on the
order, which makes truncation a plain slice and keeps lower-order results
bit-identical when a computation is repeated at higher order.

Example:
    >>> x = jet_variable(0, 0.3, dim=2, order=3)
    >>> y = jet_variable(1, 0.7, dim=2, order=3)
    >>> f = jet_exp(jet_sin(x * y))
    >>> extract_partial(f, (1, 1))
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial
from typing import Iterator, Sequence, Union

import numpy as np

from core.errors import JetDomainError, JetMismatchError, JetOrderError

logger = logging.getLogger(__name__)

DEFAULT_ORDER = 4
MAX_DIM = 8
MAX_ORDER = 8

Scalar = Union[float, int, np.ndarray]


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class _Basis:
    """Index tables for one (dim, order) pair."""

    dim: int
    order: int
    multi: np.ndarray
    degree: np.ndarray
    offsets: tuple[int, ...]
    index: dict
    left: np.ndarray
    right: np.ndarray
    starts: np.ndarray
    pair_offsets: tuple[int, ...]
    factorial: np.ndarray
    deriv_src: tuple[np.ndarray, ...]
    deriv_fac: tuple[np.ndarray, ...]

    @property
    def size(self) -> int:
        return len(self.degree)


@lru_cache(maxsize=None)
def _basis(dim: int, order: int) -> _Basis:
    if not 1 <= dim <= MAX_DIM:
        raise JetMismatchError(f"Jet dimension {dim} outside [1, {MAX_DIM}]")
    if not 0 <= order <= MAX_ORDER:
        raise JetOrderError(f"Jet order {order} outside [0, {MAX_ORDER}]")

    multis = [a for k in range(order + 1) for a in _compositions(k, dim)]
    multi = np.array(multis, dtype=np.int64).reshape(len(multis), dim)
    degree = multi.sum(axis=1)
    offsets = tuple(int(np.searchsorted(degree, k)) for k in range(order + 2))
    index = {a: i for i, a in enumerate(multis)}

    # pairs (alpha, beta) with alpha + beta = gamma, grouped by gamma
    below = np.all(multi[None, :, :] <= multi[:, None, :], axis=2)
    left, right, starts = [], [], []
    for g, gamma in enumerate(multis):
        starts.append(len(left))
        for a in np.nonzero(below[g])[0]:
            beta = tuple(int(v) for v in multi[g] - multi[a])
            left.append(int(a))
            right.append(index[beta])
    starts_arr = np.array(starts, dtype=np.int64)
    pair_offsets = tuple(
        int(starts_arr[offsets[k]]) if offsets[k] < len(multis) else len(left)
        for k in range(order + 2)
    )

    fact = np.array(
        [np.prod([factorial(int(v)) for v in a]) for a in multis], dtype=float
    )

    deriv_src, deriv_fac = [], []
    lower = offsets[order] if order > 0 else 0
    for i in range(dim):
        src = np.empty(lower, dtype=np.int64)
        fac = np.empty(lower, dtype=float)
        for b in range(lower):
            alpha = list(multis[b])
            alpha[i] += 1
            src[b] = index[tuple(alpha)]
            fac[b] = alpha[i]
        deriv_src.append(src)
        deriv_fac.append(fac)

    return _Basis(
        dim=dim,
        order=order,
        multi=multi,
        degree=degree,
        offsets=offsets,
        index=index,
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        starts=starts_arr,
        pair_offsets=pair_offsets,
        factorial=fact,
        deriv_src=tuple(deriv_src),
        deriv_fac=tuple(deriv_fac),
    )


def basis_size(dim: int, order: int) -> int:
    """Number of Taylor coefficients of a scalar jet."""
    return comb(dim + order, order)


def multi_indices(dim: int, order: int) -> list[tuple[int, ...]]:
    """Multi-indices in storage order."""
    return [tuple(int(v) for v in row) for row in _basis(dim, order).multi]


def _product(basis: _Basis, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    prod = a[..., basis.left] * b[..., basis.right]
    return np.add.reduceat(prod, basis.starts, axis=-1)


def _product_block(basis: _Basis, a: np.ndarray, b: np.ndarray, k: int) -> np.ndarray:
    """Degree-k block of the Cauchy product."""
    ps, pe = basis.pair_offsets[k], basis.pair_offsets[k + 1]
    lo, hi = basis.offsets[k], basis.offsets[k + 1]
    prod = a[..., basis.left[ps:pe]] * b[..., basis.right[ps:pe]]
    return np.add.reduceat(prod, basis.starts[lo:hi] - ps, axis=-1)


class Jet:
    """
    Jet-valued array.

    Attributes:
        coeffs: Taylor coefficients, shape ``tensor_shape + (N,)``
        dim: Number of chart variables
        order: Maximum total derivative order

    Jets are treated as immutable values. Arithmetic operators broadcast over
    the tensor shape like numpy arrays and align mixed orders by truncating to
    the lower one; the ``jet_*`` functions are strict and refuse mismatches.
    """

    __slots__ = ("coeffs", "dim", "order")
    __array_ufunc__ = None

    def __init__(self, coeffs: np.ndarray, dim: int, order: int):
        coeffs = np.asarray(coeffs, dtype=float)
        basis = _basis(dim, order)
        if coeffs.ndim == 0 or coeffs.shape[-1] != basis.size:
            raise JetMismatchError(
                f"Coefficient axis {coeffs.shape} does not fit dim={dim}, order={order}"
            )
        self.coeffs = coeffs
        self.dim = dim
        self.order = order

    # -- construction ------------------------------------------------------

    @classmethod
    def constant(cls, value: Scalar, dim: int, order: int) -> "Jet":
        return jet_constant(value, dim, order)

    @classmethod
    def zeros(cls, shape: tuple[int, ...], dim: int, order: int) -> "Jet":
        return cls(np.zeros(tuple(shape) + (basis_size(dim, order),)), dim, order)

    # -- array protocol ----------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[:-1]

    @property
    def ndim(self) -> int:
        return self.coeffs.ndim - 1

    @property
    def value(self) -> np.ndarray:
        """Order-0 part (the field values at the point)."""
        v = self.coeffs[..., 0]
        return float(v) if v.ndim == 0 else v

    def __len__(self) -> int:
        if not self.shape:
            raise TypeError("len() of a scalar jet")
        return self.shape[0]

    def __getitem__(self, key) -> "Jet":
        if not isinstance(key, tuple):
            key = (key,)
        return Jet(self.coeffs[key + (slice(None),)], self.dim, self.order)

    def transpose(self, *axes: int) -> "Jet":
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        if not axes:
            axes = tuple(reversed(range(self.ndim)))
        return Jet(self.coeffs.transpose(*axes, self.ndim), self.dim, self.order)

    @property
    def T(self) -> "Jet":
        return self.transpose()

    def swapaxes(self, a: int, b: int) -> "Jet":
        a, b = (x % self.ndim for x in (a, b))
        return Jet(np.swapaxes(self.coeffs, a, b), self.dim, self.order)

    def reshape(self, *shape: int) -> "Jet":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return Jet(self.coeffs.reshape(tuple(shape) + (-1,)), self.dim, self.order)

    def sum(self, axis=None) -> "Jet":
        if axis is None:
            axis = tuple(range(self.ndim))
        elif isinstance(axis, int):
            axis = (axis % self.ndim,)
        else:
            axis = tuple(a % self.ndim for a in axis)
        return Jet(self.coeffs.sum(axis=axis), self.dim, self.order)

    # -- arithmetic --------------------------------------------------------

    def _align(self, other) -> tuple["Jet", "Jet"]:
        if isinstance(other, Jet):
            if other.dim != self.dim:
                raise JetMismatchError(
                    f"Jet dimension mismatch: {self.dim} vs {other.dim}"
                )
            order = min(self.order, other.order)
            return truncate(self, order), truncate(other, order)
        return self, jet_constant(other, self.dim, self.order)

    def __add__(self, other) -> "Jet":
        a, b = self._align(other)
        return Jet(a.coeffs + b.coeffs, a.dim, a.order)

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        a, b = self._align(other)
        return Jet(a.coeffs - b.coeffs, a.dim, a.order)

    def __rsub__(self, other) -> "Jet":
        a, b = self._align(other)
        return Jet(b.coeffs - a.coeffs, a.dim, a.order)

    def __neg__(self) -> "Jet":
        return Jet(-self.coeffs, self.dim, self.order)

    def __pos__(self) -> "Jet":
        return self

    def __mul__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            c = np.asarray(other, dtype=float)
            return Jet(self.coeffs * c[..., None], self.dim, self.order)
        a, b = self._align(other)
        return Jet(_product(_basis(a.dim, a.order), a.coeffs, b.coeffs), a.dim, a.order)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            c = np.asarray(other, dtype=float)
            if np.any(c == 0):
                raise JetDomainError("Division by a zero constant")
            return Jet(self.coeffs / c[..., None], self.dim, self.order)
        a, b = self._align(other)
        return jet_div(a, b)

    def __rtruediv__(self, other) -> "Jet":
        a, b = self._align(other)
        return jet_div(b, a)

    def __pow__(self, p: float) -> "Jet":
        return jet_pow(self, p)

    def __repr__(self) -> str:
        return f"<Jet shape={self.shape} dim={self.dim} order={self.order}>"


# -- constructors -------------------------------------------------------------


def jet_constant(value: Scalar, dim: int, order: int) -> Jet:
    """Constant jet (or constant jet array) with the given order-0 values."""
    value = np.asarray(value, dtype=float)
    coeffs = np.zeros(value.shape + (basis_size(dim, order),))
    coeffs[..., 0] = value
    return Jet(coeffs, dim, order)


def jet_variable(i: int, x0: float, dim: int, order: int = DEFAULT_ORDER) -> Jet:
    """
    Coordinate function x_i expanded at x_i = x0.

    Raises:
        JetMismatchError: If i is outside [0, dim)
    """
    if not 0 <= i < dim:
        raise JetMismatchError(f"Variable index {i} outside [0, {dim})")
    jet = jet_constant(x0, dim, order)
    if order >= 1:
        unit = tuple(1 if k == i else 0 for k in range(dim))
        jet.coeffs[_basis(dim, order).index[unit]] = 1.0
    return jet


def jet_variables(point: Sequence[float], order: int = DEFAULT_ORDER) -> list[Jet]:
    """All coordinate functions of a chart expanded at ``point``."""
    dim = len(point)
    return [jet_variable(i, float(x), dim, order) for i, x in enumerate(point)]


def jet_stack(jets: Sequence[Jet], axis: int = 0) -> Jet:
    """Stack jets of equal tensor shape along a new tensor axis."""
    if not jets:
        raise ValueError("jet_stack needs at least one jet")
    dim = jets[0].dim
    if any(j.dim != dim for j in jets):
        raise JetMismatchError("jet_stack operands differ in dimension")
    order = min(j.order for j in jets)
    coeffs = [truncate(j, order).coeffs for j in jets]
    ndim = coeffs[0].ndim
    axis = axis % ndim if axis < 0 else axis
    return Jet(np.stack(coeffs, axis=axis), dim, order)


# -- strict ring operations -------------------------------------------------------


def _strict(a: Jet, b: Jet) -> None:
    if a.dim != b.dim or a.order != b.order:
        raise JetMismatchError(
            f"Jet mismatch: (dim={a.dim}, order={a.order}) vs "
            f"(dim={b.dim}, order={b.order})"
        )


def jet_add(a: Jet, b: Jet) -> Jet:
    _strict(a, b)
    return Jet(a.coeffs + b.coeffs, a.dim, a.order)


def jet_sub(a: Jet, b: Jet) -> Jet:
    _strict(a, b)
    return Jet(a.coeffs - b.coeffs, a.dim, a.order)


def jet_neg(a: Jet) -> Jet:
    return Jet(-a.coeffs, a.dim, a.order)


def jet_mul(a: Jet, b: Jet) -> Jet:
    """Truncated Cauchy product."""
    _strict(a, b)
    return Jet(_product(_basis(a.dim, a.order), a.coeffs, b.coeffs), a.dim, a.order)


# -- analytic compositions ------------------------------------------------------


def euler(a: Jet) -> Jet:
    """Euler operator Σ x_i ∂_i in coefficient space (scales block k by k)."""
    return Jet(a.coeffs * _basis(a.dim, a.order).degree, a.dim, a.order)


def jet_div(a: Jet, b: Jet) -> Jet:
    """
    Quotient a / b by degree recurrence.

    Raises:
        JetDomainError: If the constant term of b vanishes
    """
    if isinstance(a, Jet) and isinstance(b, Jet):
        _strict(a, b)
    basis = _basis(b.dim, b.order)
    x, y = np.broadcast_arrays(a.coeffs, b.coeffs)
    b0 = y[..., 0]
    if np.any(b0 == 0):
        raise JetDomainError("Division by a jet with zero constant term")
    tail = y.copy()
    tail[..., 0] = 0.0
    out = np.zeros(x.shape)
    out[..., 0] = x[..., 0] / b0
    for k in range(1, basis.order + 1):
        lo, hi = basis.offsets[k], basis.offsets[k + 1]
        out[..., lo:hi] = (x[..., lo:hi] - _product_block(basis, tail, out, k)) / b0[
            ..., None
        ]
    return Jet(out, b.dim, b.order)


def jet_log(a: Jet) -> Jet:
    """
    Natural logarithm.

    Raises:
        JetDomainError: If the constant term is not positive
    """
    basis = _basis(a.dim, a.order)
    x = a.coeffs
    a0 = x[..., 0]
    if np.any(a0 <= 0):
        raise JetDomainError("log of a jet with non-positive constant term")
    tail = x.copy()
    tail[..., 0] = 0.0
    out = np.zeros(x.shape)
    out[..., 0] = np.log(a0)
    for k in range(1, basis.order + 1):
        lo, hi = basis.offsets[k], basis.offsets[k + 1]
        eb = out * basis.degree
        blk = _product_block(basis, tail, eb, k)
        out[..., lo:hi] = (k * x[..., lo:hi] - blk) / (k * a0[..., None])
    return Jet(out, a.dim, a.order)


def jet_exp(a: Jet) -> Jet:
    basis = _basis(a.dim, a.order)
    x = a.coeffs
    ea = x * basis.degree
    out = np.zeros(x.shape)
    out[..., 0] = np.exp(x[..., 0])
    for k in range(1, basis.order + 1):
        lo, hi = basis.offsets[k], basis.offsets[k + 1]
        out[..., lo:hi] = _product_block(basis, out, ea, k) / k
    return Jet(out, a.dim, a.order)


def _sin_cos(a: Jet) -> tuple[Jet, Jet]:
    basis = _basis(a.dim, a.order)
    x = a.coeffs
    ea = x * basis.degree
    s = np.zeros(x.shape)
    c = np.zeros(x.shape)
    s[..., 0] = np.sin(x[..., 0])
    c[..., 0] = np.cos(x[..., 0])
    for k in range(1, basis.order + 1):
        lo, hi = basis.offsets[k], basis.offsets[k + 1]
        s_k = _product_block(basis, c, ea, k) / k
        c_k = -_product_block(basis, s, ea, k) / k
        s[..., lo:hi] = s_k
        c[..., lo:hi] = c_k
    return Jet(s, a.dim, a.order), Jet(c, a.dim, a.order)


def jet_sin(a: Jet) -> Jet:
    return _sin_cos(a)[0]


def jet_cos(a: Jet) -> Jet:
    return _sin_cos(a)[1]


def _integer_power(a: Jet, p: int) -> Jet:
    basis = _basis(a.dim, a.order)
    result = jet_constant(np.ones(a.shape), a.dim, a.order)
    base = a.coeffs
    acc = result.coeffs
    while p:
        if p & 1:
            acc = _product(basis, acc, base)
        p >>= 1
        if p:
            base = _product(basis, base, base)
    return Jet(acc, a.dim, a.order)


def jet_pow(a: Jet, p: float) -> Jet:
    """
    Real power a**p.

    Integer exponents are exact products (negative ones go through division);
    other exponents need a positive constant term.

    Raises:
        JetDomainError: On a forbidden constant term
    """
    p = float(p)
    if p.is_integer():
        n = int(p)
        if n >= 0:
            return _integer_power(a, n)
        one = jet_constant(np.ones(a.shape), a.dim, a.order)
        return jet_div(one, _integer_power(a, -n))

    basis = _basis(a.dim, a.order)
    x = a.coeffs
    a0 = x[..., 0]
    if np.any(a0 <= 0):
        raise JetDomainError(f"Non-integer power {p} of a jet with non-positive base")
    tail = x.copy()
    tail[..., 0] = 0.0
    ea = x * basis.degree
    out = np.zeros(x.shape)
    out[..., 0] = a0**p
    for k in range(1, basis.order + 1):
        lo, hi = basis.offsets[k], basis.offsets[k + 1]
        ec = out * basis.degree
        blk = p * _product_block(basis, out, ea, k) - _product_block(basis, tail, ec, k)
        out[..., lo:hi] = blk / (k * a0[..., None])
    return Jet(out, a.dim, a.order)


def jet_sqrt(a: Jet) -> Jet:
    return jet_pow(a, 0.5)


# -- derivatives -------------------------------------------------------------------


def extract_partial(a: Jet, alpha: Sequence[int]) -> Union[float, np.ndarray]:
    """
    True partial derivative ∂^α a at the expansion point.

    Raises:
        JetOrderError: If |α| exceeds the jet order
        JetMismatchError: If α has the wrong length
    """
    alpha = tuple(int(v) for v in alpha)
    if len(alpha) != a.dim:
        raise JetMismatchError(f"Multi-index {alpha} does not have length {a.dim}")
    if sum(alpha) > a.order:
        raise JetOrderError(f"|{alpha}| exceeds jet order {a.order}")
    basis = _basis(a.dim, a.order)
    i = basis.index[alpha]
    v = basis.factorial[i] * a.coeffs[..., i]
    return float(v) if np.ndim(v) == 0 else v


def partial(a: Jet, i: int) -> Jet:
    """
    Jet of ∂a/∂x_i, one order lower.

    Raises:
        JetOrderError: If the jet has order 0
    """
    if a.order == 0:
        raise JetOrderError("Cannot differentiate an order-0 jet")
    if not 0 <= i < a.dim:
        raise JetMismatchError(f"Variable index {i} outside [0, {a.dim})")
    basis = _basis(a.dim, a.order)
    coeffs = a.coeffs[..., basis.deriv_src[i]] * basis.deriv_fac[i]
    return Jet(coeffs, a.dim, a.order - 1)


def jet_gradient(a: Jet, axes: Sequence[int | None]) -> Jet:
    """
    Coordinate gradient with the new index first.

    ``axes[k]`` names the jet variable of coordinate k, or None for a
    coordinate the field does not depend on (the Killing time).
    """
    if a.order == 0:
        raise JetOrderError("Cannot differentiate an order-0 jet")
    zero = Jet.zeros(a.shape, a.dim, a.order - 1)
    parts = [zero if ax is None else partial(a, ax) for ax in axes]
    return jet_stack(parts, axis=0)


def truncate(a: Jet, order: int) -> Jet:
    """Drop every coefficient above ``order``."""
    if order == a.order:
        return a
    if order > a.order:
        raise JetOrderError(f"Cannot raise jet order {a.order} to {order}")
    n = basis_size(a.dim, order)
    return Jet(a.coeffs[..., :n], a.dim, order)


def require_order(a: Jet, needed: int, what: str) -> None:
    if a.order < needed:
        raise JetOrderError(f"{what} needs jet order >= {needed}, got {a.order}")


# -- contractions ------------------------------------------------------------------


def _pair_letter(subscripts: str) -> str:
    for c in "ZYXWVUTS":
        if c not in subscripts:
            return c
    raise ValueError("No free einsum letter for the coefficient axis")


def jet_einsum(subscripts: str, *operands) -> Union[Jet, np.ndarray]:
    """
    Einstein summation over tensor axes fused with the Cauchy product.

    Operands may be jets or constant arrays. Three or more operands are
    folded pairwise from the left, keeping only indices still needed.

    Example:
        >>> jet_einsum("ij,jk->ik", g_inv, g)  # identity as a jet matrix
    """
    if "->" not in subscripts:
        raise ValueError("jet_einsum needs an explicit '->' output")
    inputs, output = subscripts.replace(" ", "").split("->")
    specs = inputs.split(",")
    if len(specs) != len(operands):
        raise ValueError(f"{len(specs)} subscripts for {len(operands)} operands")

    jets = [op for op in operands if isinstance(op, Jet)]
    if jets:
        dim = jets[0].dim
        if any(j.dim != dim for j in jets):
            raise JetMismatchError("jet_einsum operands differ in dimension")
        order = min(j.order for j in jets)
    z = _pair_letter(subscripts)

    items = []
    for spec, op in zip(specs, operands):
        if isinstance(op, Jet):
            items.append((spec, truncate(op, order)))
        else:
            items.append((spec, np.asarray(op, dtype=float)))

    while len(items) > 1:
        (s1, x), (s2, y) = items[0], items[1]
        rest = items[2:]
        needed = set(output) | set("".join(s for s, _ in rest))
        keep = "".join(dict.fromkeys(c for c in s1 + s2 if c in needed))
        items = [(keep, _contract_pair(s1, x, s2, y, keep, z))] + rest

    spec, x = items[0]
    if isinstance(x, Jet):
        return Jet(np.einsum(f"{spec}{z}->{output}{z}", x.coeffs), x.dim, x.order)
    return np.einsum(f"{spec}->{output}", x)


def _contract_pair(s1, x, s2, y, keep, z):
    if isinstance(x, Jet) and isinstance(y, Jet):
        basis = _basis(x.dim, x.order)
        r = np.einsum(
            f"{s1}{z},{s2}{z}->{keep}{z}",
            x.coeffs[..., basis.left],
            y.coeffs[..., basis.right],
        )
        return Jet(np.add.reduceat(r, basis.starts, axis=-1), x.dim, x.order)
    if isinstance(x, Jet):
        return Jet(np.einsum(f"{s1}{z},{s2}->{keep}{z}", x.coeffs, y), x.dim, x.order)
    if isinstance(y, Jet):
        return Jet(np.einsum(f"{s1},{s2}{z}->{keep}{z}", x, y.coeffs), y.dim, y.order)
    return np.einsum(f"{s1},{s2}->{keep}", x, y)


def inverse_euler(e: Jet, constant: Scalar) -> Jet:
    """Jet L with euler(L) = e and the given constant term."""
    basis = _basis(e.dim, e.order)
    deg = basis.degree.astype(float)
    deg[0] = 1.0
    coeffs = e.coeffs / deg
    coeffs[..., 0] = constant
    return Jet(coeffs, e.dim, e.order)


def jet_matrix_inverse(a: Jet, singular_tol: float = 1e-12) -> Jet:
    """
    Inverse of a square jet matrix.

    Uses H_k = -H_0 [(G - G_0) H]_k block by block, so every order is exact
    up to rounding.

    Raises:
        JetDomainError: If |det| of the order-0 matrix is at most ``singular_tol``
    """
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise JetMismatchError(f"Matrix inverse needs a square jet, got {a.shape}")
    basis = _basis(a.dim, a.order)
    g = a.coeffs
    g0 = g[..., 0]
    if abs(np.linalg.det(g0)) <= singular_tol:
        raise JetDomainError("Singular jet matrix at the expansion point")
    h0 = np.linalg.inv(g0)
    tail = g.copy()
    tail[..., 0] = 0.0
    out = np.zeros(g.shape)
    out[..., 0] = h0
    for k in range(1, basis.order + 1):
        ps, pe = basis.pair_offsets[k], basis.pair_offsets[k + 1]
        lo, hi = basis.offsets[k], basis.offsets[k + 1]
        prod = np.einsum(
            "ijP,jkP->ikP",
            tail[..., basis.left[ps:pe]],
            out[..., basis.right[ps:pe]],
        )
        blk = np.add.reduceat(prod, basis.starts[lo:hi] - ps, axis=-1)
        out[..., lo:hi] = -np.einsum("ij,jkP->ikP", h0, blk)
    return Jet(out, a.dim, a.order)


def jet_compose(outer: Jet, inner: Sequence[Jet]) -> Jet:
    """
    Substitute jets into a jet: (outer ∘ inner)(x).

    ``outer`` is expanded in m variables at y0 and ``inner`` holds m jets over
    the domain chart whose order-0 values are y0. The shift ``inner - y0`` has
    no constant term, so the truncated series composes exactly.

    Raises:
        JetMismatchError: If the number of inner jets differs from outer.dim
    """
    if len(inner) != outer.dim:
        raise JetMismatchError(
            f"Composition needs {outer.dim} inner jets, got {len(inner)}"
        )
    dim = inner[0].dim
    order = min(min(j.order for j in inner), outer.order)
    shifts = []
    for j in inner:
        j = truncate(j, order)
        if j.ndim:
            raise JetMismatchError("Inner jets of a composition must be scalar")
        c = j.coeffs.copy()
        c[0] = 0.0
        shifts.append(Jet(c, dim, order))

    basis = _basis(dim, order)
    one = jet_constant(1.0, dim, order).coeffs
    powers = []
    for s in shifts:
        row = [one]
        for _ in range(order):
            row.append(_product(basis, row[-1], s.coeffs))
        powers.append(row)

    outer_basis = _basis(outer.dim, outer.order)
    out = np.zeros(outer.shape + (basis.size,))
    for idx, alpha in enumerate(outer_basis.multi):
        if int(alpha.sum()) > order:
            break
        mono = one
        for a, k in enumerate(alpha):
            if k:
                mono = _product(basis, mono, powers[a][int(k)])
        out += outer.coeffs[..., idx, None] * mono
    return Jet(out, dim, order)


def magnitude(a: Union[Jet, float, np.ndarray]) -> float:
    """Largest absolute order-0 value (for residual normalization)."""
    v = a.value if isinstance(a, Jet) else a
    arr = np.abs(np.asarray(v, dtype=float))
    return float(arr.max()) if arr.size else 0.0


def values(a: Union[Jet, float, np.ndarray]) -> np.ndarray:
    """Order-0 values as an array."""
    return np.asarray(a.value if isinstance(a, Jet) else a, dtype=float)


__all__ = [
    "DEFAULT_ORDER",
    "Jet",
    "basis_size",
    "euler",
    "extract_partial",
    "inverse_euler",
    "jet_add",
    "jet_compose",
    "jet_constant",
    "jet_cos",
    "jet_div",
    "jet_einsum",
    "jet_exp",
    "jet_gradient",
    "jet_log",
    "jet_matrix_inverse",
    "jet_mul",
    "jet_neg",
    "jet_pow",
    "jet_sin",
    "jet_sqrt",
    "jet_stack",
    "jet_sub",
    "jet_variable",
    "jet_variables",
    "magnitude",
    "multi_indices",
    "partial",
    "require_order",
    "truncate",
    "values",
]
