"""Normed division algebras via Cayley-Dickson doubling, and Hermitian matrices over them.

Basis convention
----------------
An element of the algebra of dimension ``2m`` is a pair ``(a, b)`` of elements of
dimension ``m`` and multiplies as::

    (a, b)(c, d) = (ac - conj(d) b,  d a + b conj(c))

Coefficients are stored flat, ``coeffs = a.coeffs + b.coeffs``.  At dimension 4
this gives the usual quaternion units ``1, i, j, k`` with ``ij = k``; at dimension
8 the units ``e0..e7`` follow from the same doubling and every octonion product in
the package uses this table.

Scalars are floats by default.  Passing :class:`fractions.Fraction` coefficients
gives an exact rational backend (meant for the real and complex fields).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Number
from typing import Sequence

import numpy as np

FIELD_DIMS = {"R": 1, "C": 2, "H": 4, "O": 8}
DIM_FIELDS = {v: k for k, v in FIELD_DIMS.items()}

DEFAULT_TOL = 1e-10


def approx_equal(a, b, tol=DEFAULT_TOL):
    """``|a - b| <= tol * (1 + max(|a|, |b|))`` -- the package-wide tolerance rule."""
    a = float(a)
    b = float(b)
    return abs(a - b) <= tol * (1.0 + max(abs(a), abs(b)))


def _check_dim(dim):
    if dim not in DIM_FIELDS:
        raise ValueError(f"algebra dimension must be 1, 2, 4 or 8, got {dim}")


# ---------------------------------------------------------------------------
# Cayley-Dickson recursion on plain coefficient sequences


def _conj_seq(x):
    return [x[0]] + [-c for c in x[1:]]


def _mul_seq(x, y):
    n = len(x)
    if n == 1:
        return [x[0] * y[0]]
    h = n // 2
    a, b = x[:h], x[h:]
    c, d = y[:h], y[h:]
    left = [p - q for p, q in zip(_mul_seq(a, c), _mul_seq(_conj_seq(d), b))]
    right = [p + q for p, q in zip(_mul_seq(d, a), _mul_seq(b, _conj_seq(c)))]
    return left + right


@lru_cache(maxsize=None)
def structure_constants(dim):
    """Tensor ``T`` with ``e_i e_j = sum_k T[i, j, k] e_k`` derived from the recursion."""
    _check_dim(dim)
    t = np.zeros((dim, dim, dim))
    eye = np.eye(dim)
    for i in range(dim):
        for j in range(dim):
            t[i, j] = _mul_seq(list(eye[i]), list(eye[j]))
    t.setflags(write=False)
    return t


def _conj_sign(dim):
    s = -np.ones(dim)
    s[0] = 1.0
    return s


def mul_arrays(x, y):
    """Batched product of coefficient arrays of shape ``(..., dim)``."""
    x = np.asarray(x)
    y = np.asarray(y)
    dim = x.shape[-1]
    if y.shape[-1] != dim:
        raise ValueError("dimension mismatch")
    t = structure_constants(dim)
    if x.dtype == object or y.dtype == object:
        t = t.astype(int).astype(object)
    return np.einsum("...i,...j,ijk->...k", x, y, t)


def conj_arrays(x):
    x = np.asarray(x)
    if x.dtype == object:
        out = -x
        out[..., 0] = x[..., 0]
        return out
    return x * _conj_sign(x.shape[-1])


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AlgebraElement:
    """An element of R, C, H or O given by ``coeffs`` (``coeffs[0]`` is the real part)."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        _check_dim(len(self.coeffs))

    @classmethod
    def unit(cls, dim, k, scale=1.0):
        c = [0.0] * dim if not isinstance(scale, Fraction) else [Fraction(0)] * dim
        c[k] = scale
        return cls(tuple(c))

    @classmethod
    def real(cls, dim, value):
        return cls.unit(dim, 0, value)

    @property
    def dim(self):
        return len(self.coeffs)

    @property
    def field(self):
        return DIM_FIELDS[self.dim]

    def array(self):
        if any(isinstance(c, Fraction) for c in self.coeffs):
            return np.array(self.coeffs, dtype=object)
        return np.array(self.coeffs, dtype=float)

    def __add__(self, other):
        if isinstance(other, Number):
            other = AlgebraElement.real(self.dim, other)
        _same_dim(self, other)
        return AlgebraElement(tuple(p + q for p, q in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Number):
            return AlgebraElement(tuple(c * other for c in self.coeffs))
        return cd_multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, Number):
            return AlgebraElement(tuple(other * c for c in self.coeffs))
        return NotImplemented

    def __truediv__(self, s):
        return AlgebraElement(tuple(c / s for c in self.coeffs))

    def conjugate(self):
        return cd_conjugate(self)

    def norm(self):
        return norm(self)

    def real_part(self):
        return real_part(self)

    def isclose(self, other, tol=DEFAULT_TOL):
        _same_dim(self, other)
        return all(approx_equal(p, q, tol) for p, q in zip(self.coeffs, other.coeffs))

    def __repr__(self):
        return f"AlgebraElement({list(self.coeffs)})"


def _same_dim(x, y):
    if x.dim != y.dim:
        raise ValueError(f"dimension mismatch: {x.dim} vs {y.dim}")


def cd_multiply(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """Cayley-Dickson product, evaluated by the doubling recursion."""
    _same_dim(x, y)
    return AlgebraElement(tuple(_mul_seq(list(x.coeffs), list(y.coeffs))))


def cd_conjugate(x: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(tuple(_conj_seq(list(x.coeffs))))


def real_part(x: AlgebraElement):
    return x.coeffs[0]


def norm_squared(x: AlgebraElement):
    return sum(c * c for c in x.coeffs)


def norm(x: AlgebraElement) -> float:
    return float(np.sqrt(float(norm_squared(x))))


# ---------------------------------------------------------------------------
# Hermitian matrices


def matmul_arrays(a, b):
    """Matrix product of algebra-valued arrays of shape ``(n, m, dim)`` and ``(m, p, dim)``."""
    dim = a.shape[-1]
    t = structure_constants(dim)
    if a.dtype == object or b.dtype == object:
        t = t.astype(int).astype(object)
    return np.einsum("ijp,jkq,pqr->ikr", a, b, t)


def conj_transpose_arrays(a):
    return conj_arrays(np.swapaxes(a, 0, 1))


def _is_exact(arr):
    return arr.dtype == object


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """Self-adjoint ``n x n`` matrix over R, C, H (any n) or O (n = 3).

    ``data`` has shape ``(n, n, dim)``: ``data[i, j]`` are the coefficients of the
    (i, j) entry.  Validation is tolerance based for floats and exact for rationals.
    """

    field: str
    data: np.ndarray

    def __post_init__(self):
        if self.field not in FIELD_DIMS:
            raise ValueError(f"unknown field {self.field!r}")
        data = np.array(self.data, dtype=object if _is_exact(np.asarray(self.data)) else float)
        dim = FIELD_DIMS[self.field]
        if data.ndim == 2 and dim == 1:
            data = data[:, :, None]
        if data.ndim != 3 or data.shape[0] != data.shape[1] or data.shape[2] != dim:
            raise ValueError(f"data shape {data.shape} does not fit field {self.field}")
        if self.field == "O" and data.shape[0] != 3:
            raise ValueError("octonionic Hermitian matrices are only supported for n = 3")
        adj = conj_transpose_arrays(data)
        if _is_exact(data):
            if not np.all(adj == data):
                raise ValueError("matrix is not Hermitian")
        else:
            scale = 1.0 + float(np.max(np.abs(data))) if data.size else 1.0
            if np.max(np.abs(adj - data), initial=0.0) > 1e-9 * scale:
                raise ValueError("matrix is not Hermitian")
            data = 0.5 * (data + adj)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    # constructors -------------------------------------------------------

    @classmethod
    def from_real(cls, field, m):
        m = np.asarray(m)
        dim = FIELD_DIMS[field]
        data = np.zeros(m.shape + (dim,), dtype=object if m.dtype == object else float)
        if m.dtype == object:
            data[...] = Fraction(0)
        data[..., 0] = m
        return cls(field, data)

    @classmethod
    def identity(cls, field, n):
        return cls.from_real(field, np.eye(n))

    @classmethod
    def zeros(cls, field, n):
        return cls.from_real(field, np.zeros((n, n)))

    @classmethod
    def diag(cls, field, values):
        return cls.from_real(field, np.diag(np.asarray(values, dtype=float)))

    @classmethod
    def from_entries(cls, field, entries):
        """Build from an ``n x n`` nested list of :class:`AlgebraElement` or coefficient lists."""
        rows = [[e.coeffs if isinstance(e, AlgebraElement) else tuple(e) for e in row] for row in entries]
        exact = any(isinstance(c, Fraction) for row in rows for e in row for c in e)
        return cls(field, np.array(rows, dtype=object if exact else float))

    # accessors ----------------------------------------------------------

    @property
    def n(self):
        return self.data.shape[0]

    @property
    def dim(self):
        return self.data.shape[2]

    @property
    def exact(self):
        return _is_exact(self.data)

    @property
    def entries(self):
        return [[AlgebraElement(tuple(self.data[i, j])) for j in range(self.n)] for i in range(self.n)]

    def __getitem__(self, ij):
        i, j = ij
        return AlgebraElement(tuple(self.data[i, j]))

    # arithmetic ---------------------------------------------------------

    def _like(self, data):
        return HermitianMatrix(self.field, data)

    def _check(self, other):
        if self.field != other.field or self.n != other.n:
            raise ValueError("field or size mismatch")

    def __add__(self, other):
        self._check(other)
        return self._like(self.data + other.data)

    def __sub__(self, other):
        self._check(other)
        return self._like(self.data - other.data)

    def __neg__(self):
        return self._like(-self.data)

    def __mul__(self, s):
        if not isinstance(s, Number):
            return NotImplemented
        return self._like(self.data * s)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self._like(self.data / s)

    def matmul(self, other):
        """Plain (generally non-Hermitian) product, returned as a raw coefficient array."""
        self._check(other)
        return matmul_arrays(self.data, other.data)

    def jordan(self, other):
        """Jordan product ``(MN + NM) / 2``."""
        self._check(other)
        prod = matmul_arrays(self.data, other.data)
        return self._like((prod + conj_transpose_arrays(prod)) / 2)

    def trace(self):
        return sum(self.data[i, i, 0] for i in range(self.n))

    def inner(self, other):
        """``<M, A> = Re tr(MA)``; equals the coordinatewise dot product."""
        self._check(other)
        if self.exact or other.exact:
            return np.sum(self.data * other.data)
        return float(np.sum(self.data * other.data))

    def frobenius(self):
        return float(np.sqrt(np.sum(np.asarray(self.data, dtype=float) ** 2)))

    def to_float(self):
        return HermitianMatrix(self.field, np.asarray(self.data, dtype=float))

    def isclose(self, other, tol=DEFAULT_TOL):
        self._check(other)
        a = np.asarray(self.data, dtype=float)
        b = np.asarray(other.data, dtype=float)
        return float(np.max(np.abs(a - b), initial=0.0)) <= tol * (1.0 + max(np.max(np.abs(a)), np.max(np.abs(b))))

    def __repr__(self):
        return f"HermitianMatrix({self.field!r}, n={self.n})"


# ---------------------------------------------------------------------------
# realification (complex pictures of R, C, H matrices)


def realify(m: HermitianMatrix) -> np.ndarray:
    """Complex ``2n x 2n`` image of a quaternionic matrix.

    Each entry ``a + bi + cj + dk`` becomes the block ``[[a+bi, c+di], [-c+di, a-bi]]``.
    The map is a *-homomorphism, so Hermitian goes to Hermitian and every quaternionic
    eigenvalue appears twice.
    """
    if m.field != "H":
        raise ValueError(f"realify expects a quaternionic matrix, got field {m.field}")
    return _quat_blocks(np.asarray(m.data, dtype=float))


def _quat_blocks(q):
    n, p = q.shape[:2]
    alpha = q[..., 0] + 1j * q[..., 1]
    beta = q[..., 2] + 1j * q[..., 3]
    out = np.zeros((2 * n, 2 * p), dtype=complex)
    out[0::2, 0::2] = alpha
    out[0::2, 1::2] = beta
    out[1::2, 0::2] = -np.conj(beta)
    out[1::2, 1::2] = np.conj(alpha)
    return out


def quaternion_matrix_to_complex(q):
    """Realify a general (not necessarily Hermitian) quaternionic coefficient array."""
    return _quat_blocks(np.asarray(q, dtype=float))


def unrealify(x: np.ndarray) -> np.ndarray:
    """Inverse of :func:`realify` on the block-structured image; returns ``(n, n, 4)`` data."""
    alpha = x[0::2, 0::2]
    beta = x[0::2, 1::2]
    return np.stack([alpha.real, alpha.imag, beta.real, beta.imag], axis=-1)


def to_complex(m: HermitianMatrix) -> np.ndarray:
    """Matrix used for spectral work: real for R, complex for C, complex 2n x 2n for H."""
    d = np.asarray(m.data, dtype=float)
    if m.field == "R":
        return d[..., 0].copy()
    if m.field == "C":
        return d[..., 0] + 1j * d[..., 1]
    if m.field == "H":
        return _quat_blocks(d)
    raise ValueError("octonionic matrices have no associative matrix picture")


def from_complex(field, x) -> HermitianMatrix:
    """Inverse of :func:`to_complex`."""
    x = np.asarray(x)
    if field == "R":
        return HermitianMatrix("R", np.real(x)[:, :, None])
    if field == "C":
        return HermitianMatrix("C", np.stack([x.real, x.imag], axis=-1))
    if field == "H":
        return HermitianMatrix("H", unrealify(x))
    raise ValueError(f"no complex picture for field {field}")


def multiplicity(field):
    """Complex dimension of the picture of one copy of the field (2 for H, else 1)."""
    return 2 if field == "H" else 1


def eigvalsh(m: HermitianMatrix) -> np.ndarray:
    """Eigenvalues (ascending).  For H each quaternionic eigenvalue is listed once."""
    w = np.linalg.eigvalsh(to_complex(m))
    return w[::2] if m.field == "H" else w


# ---------------------------------------------------------------------------
# random generation


def random_element(rng, dim, size=None):
    shape = (dim,) if size is None else tuple(np.atleast_1d(size)) + (dim,)
    return rng.standard_normal(shape)


def random_matrix_array(rng, field, n, k):
    """Random ``n x k`` array over the field (coefficient array ``(n, k, dim)``)."""
    return rng.standard_normal((n, k, FIELD_DIMS[field]))


def gram(field, b) -> HermitianMatrix:
    """``B B^*`` for a coefficient array ``b`` of shape ``(n, k, dim)``; PSD of rank <= k."""
    return HermitianMatrix(field, matmul_arrays(b, conj_transpose_arrays(b)))


def random_psd(rng, field, n, rank=None) -> HermitianMatrix:
    if rank is None:
        rank = int(rng.integers(0, n + 1))
    return gram(field, random_matrix_array(rng, field, n, rank))


def random_hermitian(rng, field, n) -> HermitianMatrix:
    a = rng.standard_normal((n, n, FIELD_DIMS[field]))
    return HermitianMatrix(field, (a + conj_transpose_arrays(a)) / 2)


def vector_to_projector(field, v) -> HermitianMatrix:
    """Rank-one ``v v^* / |v|^2`` for a coefficient array ``v`` of shape ``(n, dim)``."""
    v = np.asarray(v, dtype=float)
    b = v[:, None, :]
    return gram(field, b / np.sqrt(np.sum(v * v)))


# ---------------------------------------------------------------------------
# interchange format


def _encode_scalar(c):
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    if isinstance(c, (int, np.integer)):
        return f"{int(c)}/1"
    return float(c)


def _decode_scalar(c):
    if isinstance(c, str):
        return Fraction(c)
    return float(c)


def matrix_to_dict(m: HermitianMatrix) -> dict:
    return {
        "field": m.field,
        "n": m.n,
        "entries": [[[_encode_scalar(c) for c in m.data[i, j]] for j in range(m.n)] for i in range(m.n)],
    }


def matrix_from_dict(doc: dict) -> HermitianMatrix:
    field = doc["field"]
    n = int(doc["n"])
    entries = doc["entries"]
    if len(entries) != n or any(len(row) != n for row in entries):
        raise ValueError("entries must be an n x n array")
    dim = FIELD_DIMS[field]
    rows = [[[_decode_scalar(c) for c in e] for e in row] for row in entries]
    if any(len(e) != dim for row in rows for e in row):
        raise ValueError(f"each entry of a field-{field} matrix needs {dim} coefficients")
    exact = any(isinstance(c, Fraction) for row in rows for e in row for c in e)
    if exact:
        rows = [[[c if isinstance(c, Fraction) else Fraction(c) for c in e] for e in row] for row in rows]
    return HermitianMatrix(field, np.array(rows, dtype=object if exact else float))


def coeffs_of(x: Sequence) -> np.ndarray:
    return np.asarray(x.coeffs if isinstance(x, AlgebraElement) else x)
