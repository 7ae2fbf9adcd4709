"""The exceptional Jordan algebra H3(O), its cone of squares and the octonionic plane.

Slot convention for an element::

        [ a     z     y  ]
        [ z*    b     x  ]        (* = octonion conjugate)
        [ y*    x*    c  ]

so ``x`` sits in slot (2,3), ``y`` in slot (1,3) and ``z`` in slot (1,2).  With this
layout the cubic norm is

    det = abc - a n(x) - b n(y) - c n(z) + 2 Re((z x) y*)

which is the pairing that kills every rank-one chart point (see the test-suite).

Points of the plane are trace-1 idempotents, lines are trace-2 idempotents, and
incidence is face membership in the cone of squares.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import conj_arrays, matmul_arrays, mul_arrays, structure_constants

LAMBDA_LADDER = tuple(10.0 ** -k for k in range(1, 7))
DISCRIMINANT_TOL = 1e-8


class AlbertError(ValueError):
    """Raised with a ``witness`` payload when a construction degenerates."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


def _onorm2(u):
    return float(u @ u)


@dataclass(frozen=True, eq=False)
class AlbertElement:
    diag: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        for name, size in (("diag", 3), ("x", 8), ("y", 8), ("z", 8)):
            v = np.array(getattr(self, name), dtype=float).reshape(size)
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    # constructors ---------------------------------------------------------

    @classmethod
    def from_matrix(cls, m):
        m = np.asarray(m, dtype=float)
        return cls(np.array([m[0, 0, 0], m[1, 1, 0], m[2, 2, 0]]), m[1, 2], m[0, 2], m[0, 1])

    @classmethod
    def from_coords(cls, v):
        v = np.asarray(v, dtype=float)
        return cls(v[:3], v[3:11], v[11:19], v[19:27])

    @classmethod
    def diagonal(cls, a, b, c):
        z = np.zeros(8)
        return cls(np.array([a, b, c], dtype=float), z, z, z)

    @classmethod
    def identity(cls):
        return cls.diagonal(1, 1, 1)

    @classmethod
    def unit(cls, i):
        d = np.zeros(3)
        d[i] = 1.0
        return cls.diagonal(*d)

    # views ----------------------------------------------------------------

    def matrix(self):
        m = np.zeros((3, 3, 8))
        for i in range(3):
            m[i, i, 0] = self.diag[i]
        m[1, 2], m[2, 1] = self.x, conj_arrays(self.x)
        m[0, 2], m[2, 0] = self.y, conj_arrays(self.y)
        m[0, 1], m[1, 0] = self.z, conj_arrays(self.z)
        return m

    def coords(self):
        """The 27 real coordinates ``(a, b, c, x, y, z)``."""
        return np.concatenate([self.diag, self.x, self.y, self.z])

    def trace(self):
        return float(np.sum(self.diag))

    def __add__(self, other):
        return AlbertElement.from_coords(self.coords() + other.coords())

    def __sub__(self, other):
        return AlbertElement.from_coords(self.coords() - other.coords())

    def __neg__(self):
        return AlbertElement.from_coords(-self.coords())

    def __mul__(self, s):
        return AlbertElement.from_coords(self.coords() * float(s))

    __rmul__ = __mul__

    def __truediv__(self, s):
        return AlbertElement.from_coords(self.coords() / float(s))

    def distance(self, other):
        return float(np.linalg.norm(self.coords() - other.coords()))

    def to_dict(self):
        return {"diag": self.diag.tolist(), "x": self.x.tolist(), "y": self.y.tolist(), "z": self.z.tolist()}

    @classmethod
    def from_dict(cls, doc):
        return cls(doc["diag"], doc["x"], doc["y"], doc["z"])

    def __repr__(self):
        return f"AlbertElement(diag={self.diag.tolist()})"


IDENTITY = AlbertElement.identity()


def jordan_product(a: AlbertElement, b: AlbertElement) -> AlbertElement:
    p = matmul_arrays(a.matrix(), b.matrix())
    sym = (p + conj_arrays(np.swapaxes(p, 0, 1))) / 2
    return AlbertElement.from_matrix(sym)


def square(a):
    return jordan_product(a, a)


def freudenthal_det(a: AlbertElement) -> float:
    p, q, r = a.diag
    zx = mul_arrays(a.z, a.x)
    triple = float(mul_arrays(zx, conj_arrays(a.y))[0])
    return float(p * q * r - p * _onorm2(a.x) - q * _onorm2(a.y) - r * _onorm2(a.z) + 2 * triple)


def char_coeffs(a: AlbertElement):
    """``(tr, sigma, det)`` of the characteristic cubic ``l^3 - tr l^2 + sigma l - det``."""
    tr = a.trace()
    tr_sq = float(np.sum(a.diag ** 2) + 2 * (_onorm2(a.x) + _onorm2(a.y) + _onorm2(a.z)))
    sigma = (tr * tr - tr_sq) / 2
    return tr, sigma, freudenthal_det(a)


def cubic_discriminant(tr, sigma, det):
    # for l^3 + B l^2 + C l + D with B = -tr, C = sigma, D = -det
    b, c, d = -tr, sigma, -det
    return 18 * b * c * d - 4 * b ** 3 * d + b * b * c * c - 4 * c ** 3 - 27 * d * d


def cone_member(a: AlbertElement, tol=1e-10) -> bool:
    """Membership in the cone of sums of squares via the signs of the cubic's coefficients.

    Real-rootedness of the cubic is taken as given; a clearly negative discriminant
    raises :class:`AlbertError` instead of returning a guess.
    """
    tr, sigma, det = char_coeffs(a)
    scale = max(1.0, float(np.linalg.norm(a.coords())))
    disc = cubic_discriminant(tr, sigma, det)
    if disc < -DISCRIMINANT_TOL * scale ** 6:
        raise AlbertError("characteristic cubic has non-real roots", witness=a.to_dict())
    return tr >= -tol * scale and sigma >= -tol * scale ** 2 and det >= -tol * scale ** 3


def eigenvalues(a: AlbertElement) -> np.ndarray:
    tr, sigma, det = char_coeffs(a)
    return np.sort(np.real(np.roots([1.0, -tr, sigma, -det])))


def idempotent_residual(a: AlbertElement) -> float:
    return square(a).distance(a)


def is_idempotent(a: AlbertElement, tol=1e-10) -> bool:
    return idempotent_residual(a) <= tol


def chart_point(x, y) -> AlbertElement:
    """Normalised rank-one element ``v v* / |v|^2`` for ``v = (x, y, 1)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    s = 1.0 + _onorm2(x) + _onorm2(y)
    xy = mul_arrays(x, conj_arrays(y))
    p = AlbertElement(np.array([_onorm2(x), _onorm2(y), 1.0]) / s, y / s, x / s, xy / s)
    res = idempotent_residual(p)
    if res > 1e-8:
        raise AlbertError(f"chart point is not idempotent (residual {res:.3g})", witness=p.to_dict())
    return p


def random_point(rng) -> AlbertElement:
    return chart_point(rng.standard_normal(8), rng.standard_normal(8))


def in_face(a: AlbertElement, m: AlbertElement, tol=1e-10) -> bool:
    """Does ``a`` lie in the face of the cone generated by ``m``?"""
    return any(cone_member(m - lam * a, tol) for lam in LAMBDA_LADDER)


def _require_idempotent(p, trace, name):
    if abs(p.trace() - trace) > 1e-8 or idempotent_residual(p) > 1e-8:
        raise AlbertError(f"{name} is not an idempotent of trace {trace}", witness=p.to_dict())


def dual_line(p: AlbertElement) -> AlbertElement:
    _require_idempotent(p, 1, "point")
    return IDENTITY - p


def duality_check(a: AlbertElement, b: AlbertElement, tol=1e-10) -> bool:
    """``a in face(I - b)`` agrees with ``b in face(I - a)``."""
    return in_face(a, dual_line(b), tol) == in_face(b, dual_line(a), tol)


def cross(p: AlbertElement, q: AlbertElement) -> AlbertElement:
    """Freudenthal cross product of two elements."""
    tp, tq = p.trace(), q.trace()
    pq = jordan_product(p, q)
    return pq - 0.5 * tp * q - 0.5 * tq * p + 0.5 * (tp * tq - pq.trace()) * IDENTITY


def line_through(p: AlbertElement, q: AlbertElement) -> AlbertElement:
    """Trace-2 idempotent whose face contains both points."""
    _require_idempotent(p, 1, "p")
    _require_idempotent(q, 1, "q")
    if p.distance(q) <= 1e-6:
        raise AlbertError("points coincide", witness={"p": p.to_dict(), "q": q.to_dict()})
    r = cross(p, q)
    tr = r.trace()
    if abs(tr) <= 1e-12:
        raise AlbertError("cross product vanishes", witness={"p": p.to_dict(), "q": q.to_dict()})
    return IDENTITY - r / tr


def meet_of_lines(e1: AlbertElement, e2: AlbertElement) -> AlbertElement:
    """Trace-1 idempotent lying in the faces of both lines."""
    _require_idempotent(e1, 2, "first line")
    _require_idempotent(e2, 2, "second line")
    return IDENTITY - line_through(IDENTITY - e1, IDENTITY - e2)


def incidence_residual(p: AlbertElement, e: AlbertElement) -> float:
    """``|| p o e - p ||``: zero exactly when the point lies on the line."""
    return jordan_product(p, e).distance(p)


def ambient_dimension():
    """Real dimension of H3(O) (27); the trace-one slice has one less."""
    return 3 + 3 * 8


# keep the structure tensor warm for batch work
structure_constants(8)
