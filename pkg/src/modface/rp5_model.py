"""The five-dimensional body with a projective-plane face lattice.

Two halves live here.

* Exact symbolic work on the seven-point normal form ``p0 = 0, p1..p5 = e1..e5,
  p6 = (1,1,1,1,1)``: the plane parametrisation ``r u1 + s u2 + t u3`` with
  ``u1 = (a,b,0,0,0)``, ``u2 = (0,0,c,d,0)``, ``u3 = (e,e,e,e,f)``, the three
  incidence determinants, the combined determinant and its linear x quadratic
  factorisation.  All of it is over :class:`fractions.Fraction`.

* Floating-point geometry of concrete bodies: the trace-one slice of the real
  3x3 PSD cone pushed through a projective map of RP^5 (``ProjectiveBody``),
  span checks, conic fits and the projective-equivalence constructor.

Homogeneous coordinates are 6-vectors ``(y, w)`` standing for ``y / w`` in R^5.
Symmetric 3x3 matrices are stored as ``svec = (x00, x11, x22, x01, x02, x12)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .algebra import HermitianMatrix
from .cone_faces import SlicedBody
from .polynomials import Poly, det3

VARS = ("a", "b", "c", "d", "e", "f")
AB = ("a", "b")
DIST_TOL = 1e-8

# lines of the seven-point configuration; the first three are forced by the
# parametrisation, the rest are recovered by ``derive_incidence``
BASE_INCIDENCE = ((0, 1, 2), (0, 3, 4), (0, 5, 6))
INCIDENCE = BASE_INCIDENCE + ((2, 3, 5), (1, 4, 5), (1, 3, 6))

_SVEC = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))


class R5Error(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


# ---------------------------------------------------------------------------
# normal form and plane parameters


def normal_form_points():
    """The seven points as exact rationals, shape (7, 5) object array."""
    pts = [[Fraction(0)] * 5]
    for i in range(5):
        pts.append([Fraction(int(i == j)) for j in range(5)])
    pts.append([Fraction(1)] * 5)
    return np.array(pts, dtype=object)


@dataclass(frozen=True)
class PlaneParams:
    a: float
    b: float
    c: float
    d: float
    e: float
    f: float

    def as_dict(self):
        return {v: getattr(self, v) for v in VARS}

    def generators(self):
        a, b, c, d, e, f = (getattr(self, v) for v in VARS)
        z = 0 * a
        return np.array([[a, b, z, z, z], [z, z, c, d, z], [e, e, e, e, f]], dtype=object)


@dataclass(frozen=True, eq=False)
class AffinePlane:
    """Affine 2-plane ``origin + span(basis)`` in R^5 with an orthonormal basis."""

    origin: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        o = np.asarray(self.origin, dtype=float).reshape(-1)
        b = np.asarray(self.basis, dtype=float)
        if b.ndim != 2 or b.shape[0] != o.size:
            raise R5Error("basis must be an (n, k) array")
        q, r = np.linalg.qr(b)
        if b.shape[1] and abs(r[-1, -1]) <= 1e-12 * max(1.0, abs(r[0, 0])):
            raise R5Error("degenerate plane generators")
        object.__setattr__(self, "origin", o)
        object.__setattr__(self, "basis", q)

    @classmethod
    def through(cls, p, q, r):
        p, q, r = (np.asarray(x, dtype=float) for x in (p, q, r))
        return cls(p, np.column_stack([q - p, r - p]))

    @property
    def dim(self):
        return self.basis.shape[1]

    def coords(self, x):
        """Orthonormal plane coordinates of points (rows) of ``x``."""
        return (np.atleast_2d(x) - self.origin) @ self.basis

    def embed(self, uv):
        return self.origin + np.atleast_2d(uv) @ self.basis.T

    def closest(self, other: AffinePlane):
        """Closest pair of points and their distance."""
        m = np.column_stack([self.basis, -other.basis])
        st, *_ = np.linalg.lstsq(m, other.origin - self.origin, rcond=None)
        x = self.origin + self.basis @ st[: self.dim]
        y = other.origin + other.basis @ st[self.dim :]
        return x, y, float(np.linalg.norm(x - y))

    def distance(self, other: AffinePlane) -> float:
        return self.closest(other)[2]

    def point_distance(self, x) -> float:
        d = np.asarray(x, dtype=float) - self.origin
        return float(np.linalg.norm(d - self.basis @ (self.basis.T @ d)))

    def intersect(self, other: AffinePlane, tol=1e-6):
        """The unique common point of two planes that meet transversally."""
        m = np.column_stack([self.basis, -other.basis])
        sv = np.linalg.svd(m, compute_uv=False)
        x, y, dist = self.closest(other)
        if dist > tol * (1 + np.linalg.norm(x)) or sv[-1] <= 1e-9 * sv[0]:
            raise R5Error(
                "planes do not meet in a single point",
                witness={"distance": dist, "smallest_singular_value": float(sv[-1])},
            )
        return (x + y) / 2

    def to_dict(self):
        return {"origin": self.origin.tolist(), "basis": self.basis.tolist()}

    @classmethod
    def from_dict(cls, doc):
        return cls(np.array(doc["origin"]), np.array(doc["basis"]))


def plane_from_params(q: PlaneParams) -> AffinePlane:
    g = np.array(q.generators(), dtype=float)
    try:
        return AffinePlane.through(*g)
    except R5Error:
        raise R5Error("plane generators are affinely dependent", witness=q.as_dict()) from None


def random_plane(rng, scale=1.0) -> AffinePlane:
    return AffinePlane(scale * rng.uniform(-1, 1, 5), rng.standard_normal((5, 2)))


# ---------------------------------------------------------------------------
# exact symbolic conditions


def _gens():
    return Poly.gens(VARS)


def condition_matrix(i):
    """Rows of the linear system in ``(r, s, t)`` for the plane meeting ``S_i``."""
    a, b, c, d, e, f = _gens()
    if i == 4:
        return [[a, 0 * a, e], [0 * a, d, e], [b - 1, c - 1, 2 * e + f - 1]]
    if i == 5:
        return [[b, 0 * a, e], [0 * a, c, e], [a - 1, d - 1, 2 * e + f - 1]]
    if i == 6:
        return [[b, 0 * a, e - f], [0 * a, d, e - f], [a - 1, c - 1, 2 * e - f - 1]]
    raise R5Error(f"condition index must be 4, 5 or 6, got {i}")


def det_condition_poly(i) -> Poly:
    return det3(condition_matrix(i))


def det_condition_i(q: PlaneParams, i):
    return det_condition_poly(i)(**q.as_dict())


def combined_matrix_poly():
    """Row i: (d/de, d/df, value at e = f = 0) of the i-th condition."""
    rows = []
    for i in (4, 5, 6):
        p = det_condition_poly(i)
        if p.diff("e").diff("e").terms or p.diff("f").diff("f").terms or p.diff("e").diff("f").terms:
            raise R5Error(f"condition {i} is not linear in (e, f)")
        rows.append([p.diff("e"), p.diff("f"), p.subs({"e": 0, "f": 0})])
    return rows


def printed_matrix_poly():
    """Reference form of the combined matrix, transcribed by hand for the entrywise comparison."""
    a, b, c, d, _, _ = _gens()
    return [
        [-a * c + 2 * a * d - b * d + a + d, a * d, -a * d],
        [-a * c + 2 * b * c - b * d + b + c, b * c, -b * c],
        [-a * d - b * c + 2 * b * d + b + d, a * d + b * c - b * d - b - d, -b * d],
    ]


def fidelity_table():
    """Entrywise comparison of the derived and printed matrices."""
    derived, printed = combined_matrix_poly(), printed_matrix_poly()
    out = []
    for i, j in itertools.product(range(3), range(3)):
        diff = derived[i][j] - printed[i][j]
        out.append(
            {
                "entry": (i + 1, j + 1),
                "derived": str(derived[i][j]),
                "printed": str(printed[i][j]),
                "difference": str(diff),
                "match": diff.is_zero(),
            }
        )
    return out


def combined_condition_poly() -> Poly:
    return det3(combined_matrix_poly())


def combined_matrix(a, b, c, d):
    vals = dict(a=a, b=b, c=c, d=d, e=0, f=0)
    return [[p(**vals) for p in row] for row in combined_matrix_poly()]


def combined_condition(a, b, c, d):
    return combined_condition_poly()(a=a, b=b, c=c, d=d, e=0, f=0)


def derive_incidence():
    """Which normal-form points lie on S4, S5, S6.

    ``p_j`` lies on ``S_i`` iff the i-th condition vanishes identically once the
    parametrised plane is forced through ``p_j``.
    """
    through = {
        0: {"a": 0, "b": 0},
        1: {"a": 1, "b": 0},
        2: {"a": 0, "b": 1},
        3: {"c": 1, "d": 0},
        4: {"c": 0, "d": 1},
        5: {"e": 0, "f": 1},
        6: {"e": 1, "f": 1},
    }
    table = []
    for i in (4, 5, 6):
        p = det_condition_poly(i)
        on = tuple(j for j, sub in through.items() if p.subs(sub).is_zero())
        table.append(on)
    return BASE_INCIDENCE + tuple(table)


# ---------------------------------------------------------------------------
# factorisation of the combined condition


@dataclass(frozen=True)
class Factorization:
    c: object
    d: object
    cubic: Poly
    linear: Poly
    quadratic: Poly
    remainder: Poly

    @property
    def exact(self):
        return self.remainder.is_zero() and (self.linear * self.quadratic - self.cubic).is_zero()

    def to_dict(self):
        return {
            "c": str(self.c),
            "d": str(self.d),
            "linear": str(self.linear),
            "quadratic": str(self.quadratic),
            "remainder": str(self.remainder),
        }


def _to_ab(p: Poly) -> Poly:
    idx = [p.vars.index(v) for v in AB]
    out = {}
    for e, c in p.terms.items():
        if any(k for i, k in enumerate(e) if i not in idx):
            raise R5Error("polynomial depends on variables other than a, b")
        key = tuple(e[i] for i in idx)
        out[key] = out.get(key, 0) + c
    return Poly(AB, out)


def _rational_roots(coeffs):
    """Rational roots of ``sum coeffs[k] t^k`` (exact Fractions), ascending order."""
    while coeffs and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    if len(coeffs) <= 1:
        return []
    den = 1
    for c in coeffs:
        den = den * c.denominator // np.gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    lead = abs(ints[-1])
    found = []
    if ints[0] == 0:
        found.append(Fraction(0))
    for r in np.roots([float(c) for c in reversed(ints)]):
        if abs(r.imag) > 1e-6 * (1 + abs(r.real)):
            continue
        cand = Fraction(r.real).limit_denominator(lead)
        if sum(c * cand ** k for k, c in enumerate(coeffs)) == 0 and cand not in found:
            found.append(cand)
    return sorted(found)


def _linear_candidates(top: Poly):
    """Rational linear forms ``alpha a + beta b`` dividing the cubic top form."""
    k = [top.terms.get((j, 3 - j), Fraction(0)) for j in range(4)]
    out = []
    if k[3] == 0:
        out.append((Fraction(0), Fraction(1)))
    out += [(Fraction(1), -r) for r in _rational_roots(k)]
    return out


def factor_condition(c, d) -> Factorization:
    """Exact split of ``q(a, b) = combined_condition(a, b, c, d)`` into linear x quadratic."""
    c, d = Fraction(c), Fraction(d)
    q = _to_ab(combined_condition_poly().subs({"c": c, "d": d}))
    if q.degree() != 3:
        raise R5Error("combined condition is not a cubic at these parameters", witness={"c": str(c), "d": str(d)})
    ring = ("a", "b", "g")
    a, b, g = Poly.gens(ring)
    lifted = Poly(ring, {e + (0,): v for e, v in q.terms.items()})
    for alpha, beta in _linear_candidates(q.homogeneous_part(3)):
        # restrict q to the line alpha a + beta b + g = 0 and solve for g
        if alpha != 0:
            restricted = lifted.subs({"a": (-beta * b - g) * (1 / alpha)})
            free = "b"
        else:
            restricted = lifted.subs({"b": -g * (1 / beta)})
            free = "a"
        gammas = []
        for k in range(3, -1, -1):
            coef = restricted.coefficient(free, k)
            coef = Poly(("g",), {(e[2],): v for e, v in coef.terms.items()})
            if coef.is_zero():
                continue
            if coef.degree() == 1:
                gammas = [-coef.terms.get((0,), Fraction(0)) / coef.terms[(1,)]]
            else:
                gammas = _rational_roots([coef.terms.get((j,), Fraction(0)) for j in range(coef.degree() + 1)])
            break
        for gamma in gammas:
            linear = Poly(AB, {(1, 0): alpha, (0, 1): beta, (0, 0): gamma})
            quad, rem = q.divmod(linear)
            if rem.is_zero():
                return Factorization(c, d, q, linear, quad, rem)
    raise R5Error(
        "combined condition has no rational linear factor at these parameters",
        witness={"c": str(c), "d": str(d), "cubic": str(q)},
    )


def factor_condition_numeric(c, d):
    """Float version for boundary comparisons: returns ``(linear, quadratic, residual)``
    as coefficient dicts keyed by ``(i, j)`` for ``a^i b^j``."""
    q = _to_ab(combined_condition_poly().subs({"c": Fraction(float(c)), "d": Fraction(float(d))}))
    cubic = {e: float(v) for e, v in q.terms.items()}
    top = [cubic.get((j, 3 - j), 0.0) for j in range(4)]
    dirs = [(1.0, -r.real) for r in np.roots(top[::-1]) if abs(r.imag) < 1e-9 * (1 + abs(r))]
    if abs(top[3]) < 1e-12 * max(1.0, max(map(abs, top))):
        dirs.append((0.0, 1.0))
    quad_monos = [(i, j) for i in range(3) for j in range(3 - i)]
    cubic_monos = [(i, j) for i in range(4) for j in range(4 - i)]
    rhs = np.array([cubic.get(mono, 0.0) for mono in cubic_monos])
    ring = ("a", "b", "g")
    _, bb, gg = Poly.gens(ring)
    lifted = Poly(ring, {e + (0,): v for e, v in cubic.items()})
    best = None
    for alpha, beta in dirs:
        if alpha != 0:
            restricted, free = lifted.subs({"a": (-beta * bb - gg) * (1 / alpha)}), "b"
        else:
            restricted, free = lifted.subs({"b": -gg * (1 / beta)}), "a"
        # coefficient of free^2 on the line is affine in g
        coef = restricted.coefficient(free, 2)
        g1 = sum(v for e, v in coef.terms.items() if e[2] == 1)
        g0 = sum(v for e, v in coef.terms.items() if e[2] == 0)
        if abs(g1) < 1e-12:
            continue
        g = -g0 / g1
        m = np.zeros((len(cubic_monos), len(quad_monos)))
        for k, (i, j) in enumerate(quad_monos):
            for (di, dj), coeff in (((1, 0), alpha), ((0, 1), beta), ((0, 0), g)):
                m[cubic_monos.index((i + di, j + dj)), k] += coeff
        qv, *_ = np.linalg.lstsq(m, rhs, rcond=None)
        res = float(np.linalg.norm(m @ qv - rhs) / max(1.0, np.linalg.norm(rhs)))
        if best is None or res < best[2]:
            best = ({(1, 0): alpha, (0, 1): beta, (0, 0): g}, dict(zip(quad_monos, qv)), res)
    if best is None:
        raise R5Error("no real linear factor direction", witness={"c": c, "d": d})
    return best


# ---------------------------------------------------------------------------
# symmetric matrices and projective maps


def svec(x):
    x = np.asarray(x, dtype=float)
    return np.array([x[i, j] for i, j in _SVEC])


def smat(y):
    m = np.zeros((3, 3))
    for (i, j), v in zip(_SVEC, y):
        m[i, j] = m[j, i] = v
    return m


def rank_one_svec(v):
    v = np.asarray(v, dtype=float)
    return svec(np.outer(v, v) / (v @ v))


def homogenize(pts):
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    return np.column_stack([pts, np.ones(len(pts))])


def dehomogenize(h):
    h = np.atleast_2d(h)
    return h[:, :-1] / h[:, -1:]


def frame_map(src, dst):
    """The projective map sending seven homogeneous points ``src[i]`` to ``dst[i]``.

    Both arguments are (7, 6) arrays; any six rows of each must be independent.
    """
    src = np.asarray(src, dtype=float)
    dst = np.asarray(dst, dtype=float)
    a, b = src[:6].T, dst[:6].T
    alpha = np.linalg.solve(a, src[6])
    beta = np.linalg.solve(b, dst[6])
    if np.min(np.abs(alpha)) < 1e-10 * np.max(np.abs(alpha)) or np.min(np.abs(beta)) < 1e-10 * np.max(np.abs(beta)):
        raise R5Error("points are not in general position", witness={"alpha": alpha.tolist(), "beta": beta.tolist()})
    m = b @ np.diag(beta / alpha) @ np.linalg.inv(a)
    return m / np.linalg.norm(m)


def apply_projective(m, pts):
    return dehomogenize(homogenize(pts) @ np.asarray(m).T)


def general_position_margin(h):
    """Smallest relative singular value over all 6-subsets of the rows of ``h``."""
    worst = np.inf
    for rows in itertools.combinations(range(len(h)), h.shape[1]):
        sv = np.linalg.svd(h[list(rows)], compute_uv=False)
        worst = min(worst, sv[-1] / sv[0])
    return float(worst)


# ---------------------------------------------------------------------------
# conics in plane coordinates


def fit_conic(uv):
    """Least-squares conic ``[u v 1] Q [u v 1]^T = 0`` through 2-d points (>= 5)."""
    uv = np.asarray(uv, dtype=float)
    m = np.median(uv, axis=0)
    s = max(float(np.median(np.abs(uv - m))), 1e-300)
    w = (uv - m) / s
    h = homogenize(w)
    h = h / np.linalg.norm(h, axis=1, keepdims=True)
    design = np.column_stack([h[:, 0] ** 2, h[:, 0] * h[:, 1], h[:, 1] ** 2, h[:, 0] * h[:, 2], h[:, 1] * h[:, 2], h[:, 2] ** 2])
    coef = np.linalg.svd(design)[2][-1]
    qw = np.array(
        [[coef[0], coef[1] / 2, coef[3] / 2], [coef[1] / 2, coef[2], coef[4] / 2], [coef[3] / 2, coef[4] / 2, coef[5]]]
    )
    t = np.array([[1 / s, 0, -m[0] / s], [0, 1 / s, -m[1] / s], [0, 0, 1]])
    q = t.T @ qw @ t
    return q / np.linalg.norm(q)


def conic_residual(q, uv):
    """Largest normalised algebraic residual of points against a conic."""
    h = homogenize(uv)
    h = h / np.linalg.norm(h, axis=1, keepdims=True)
    vals = np.einsum("ni,ij,nj->n", h, q, h)
    return float(np.max(np.abs(vals)) / np.linalg.norm(q))


def conic_coeffs(q):
    """``(A, B, C, D, E, F)`` of ``A u^2 + B uv + C v^2 + D u + E v + F``."""
    return np.array([q[0, 0], 2 * q[0, 1], q[1, 1], 2 * q[0, 2], 2 * q[1, 2], q[2, 2]])


def ellipse_frame(q):
    """Affine map ``u -> G (u - c)`` sending the ellipse ``q`` onto the unit circle."""
    q = np.asarray(q, dtype=float)
    a, g, h = q[:2, :2], q[:2, 2], q[2, 2]
    if np.linalg.det(a) <= 0:
        raise R5Error("conic is not an ellipse", witness=q.tolist())
    c = -np.linalg.solve(a, g)
    k = float(g @ np.linalg.solve(a, g) - h)
    if a[0, 0] < 0:
        a, k = -a, -k
    if k <= 0:
        raise R5Error("ellipse has no real points", witness=q.tolist())
    w, v = np.linalg.eigh(a / k)
    return v @ np.diag(np.sqrt(w)) @ v.T, c


# ---------------------------------------------------------------------------
# projective images of the real trace slice


@dataclass(frozen=True, eq=False)
class ProjectiveBody:
    """``{ pi(L svec(X)) : X PSD 3x3 real, X != 0 }`` with ``pi(y, w) = y / w``.

    The last row of ``L``, read as a symmetric matrix ``N``, is the denominator.
    When ``N`` is definite the body is compact and is a linear image of the section
    ``{X PSD : <N, X> = 1}``.  Otherwise the body crosses the hyperplane at
    infinity and its affine part is unbounded; every oracle below still works
    away from that hyperplane.
    """

    L: np.ndarray

    def __post_init__(self):
        m = np.array(self.L, dtype=float)
        if m.shape != (6, 6):
            raise R5Error("projective map must be 6x6")
        if np.linalg.cond(m) > 1e12:
            raise R5Error("projective map is singular")
        ev = np.linalg.eigvalsh(self._nmat(m))
        if ev[-1] < -ev[0]:
            m = -m
        m.setflags(write=False)
        object.__setattr__(self, "L", m)
        object.__setattr__(self, "_Linv", np.linalg.inv(m))

    @staticmethod
    def _nmat(m):
        n = m[5]
        return np.array([[n[0], n[3] / 2, n[4] / 2], [n[3] / 2, n[1], n[5] / 2], [n[4] / 2, n[5] / 2, n[2]]])

    @property
    def denominator(self):
        return self._nmat(self.L)

    @property
    def bounded(self):
        ev = np.linalg.eigvalsh(self.denominator)
        return bool(ev[0] > 1e-9 * abs(ev[-1]))

    @property
    def section(self) -> SlicedBody:
        return SlicedBody(HermitianMatrix.from_real("R", self.denominator))

    def point(self, x):
        """Image of a symmetric matrix (or stack of them)."""
        x = np.asarray(x, dtype=float)
        s = np.array([svec(m) for m in x]) if x.ndim == 3 else svec(x)[None]
        return dehomogenize(s @ self.L.T)

    def extreme_point(self, v):
        v = np.atleast_2d(np.asarray(v, dtype=float))
        return dehomogenize(np.array([rank_one_svec(u) for u in v]) @ self.L.T)

    def pullback(self, y):
        """Trace-one symmetric matrices whose images are the points ``y``."""
        s = homogenize(y) @ self._Linv.T
        mats = np.array([smat(r) for r in s])
        return mats / np.trace(mats, axis1=1, axis2=2)[:, None, None]

    def pullback_vector(self, y):
        """Unit vector of the rank-one matrix over an extreme point."""
        w, v = np.linalg.eigh(self.pullback(y)[0])
        return v[:, -1]

    def extreme_residual(self, y):
        """How far the pullbacks of ``y`` are from PSD rank one (0 on extreme points)."""
        ev = np.linalg.eigvalsh(self.pullback(y))
        return float(np.max(np.abs(ev[:, :2]).sum(axis=1) / np.abs(ev[:, 2])))

    def face_points(self, w):
        """Three points spanning the face with 2-dim range ``span(w)`` (w is 3x2)."""
        w = np.asarray(w, dtype=float)
        return self.extreme_point(np.array([w[:, 0], w[:, 1], w[:, 0] + w[:, 1]]))

    def face_span(self, w) -> AffinePlane:
        """Affine part of the projective plane spanned by the face with range ``span(w)``."""
        w = np.asarray(w, dtype=float)
        gens = np.array([rank_one_svec(u) for u in (w[:, 0], w[:, 1], w[:, 0] + w[:, 1])]).T
        q, _ = np.linalg.qr(self.L @ gens)
        top = q @ q[5]
        if abs(top[5]) < 1e-12:
            raise R5Error("face span lies at infinity", witness=w.tolist())
        null = np.linalg.svd(q[5][None, :])[2][1:].T
        return AffinePlane(top[:5] / top[5], (q @ null)[:5])

    def face_through(self, y1, y2):
        """Range (3x2 orthonormal) of the face spanned by two extreme points."""
        u = np.column_stack([self.pullback_vector(y1), self.pullback_vector(y2)])
        q, r = np.linalg.qr(u)
        if abs(r[1, 1]) < 1e-9:
            raise R5Error("extreme points coincide", witness={"y1": np.ravel(y1).tolist(), "y2": np.ravel(y2).tolist()})
        return q

    def boundary(self, w, thetas):
        w = np.asarray(w, dtype=float)
        th = np.asarray(thetas, dtype=float)
        return self.extreme_point(np.outer(np.cos(th), w[:, 0]) + np.outer(np.sin(th), w[:, 1]))

    def face_residual(self, pts):
        """Zero iff the points lie in one face span (their pullbacks share a kernel)."""
        mats = self.pullback(pts)
        mats = mats / np.linalg.norm(mats, axis=(1, 2))[:, None, None]
        sv = np.linalg.svd(np.hstack(list(mats)), compute_uv=False)
        return float(sv[-1] / sv[0])

    def random_face(self, rng):
        q, _ = np.linalg.qr(rng.standard_normal((3, 2)))
        return q

    def random_extreme_point(self, rng, size=1):
        return self.extreme_point(rng.standard_normal((size, 3)))

    def transformed(self, t, shift=None):
        """Image under the affine map ``y -> t y + shift`` of R^5."""
        h = np.eye(6)
        h[:5, :5] = t
        if shift is not None:
            h[:5, 5] = shift
        return ProjectiveBody(h @ self.L)

    def projectively_transformed(self, m):
        return ProjectiveBody(np.asarray(m) @ self.L)

    def to_dict(self):
        return {"L": self.L.tolist()}

    @classmethod
    def from_dict(cls, doc):
        return cls(np.array(doc["L"]))


@dataclass(frozen=True, eq=False)
class SevenPointConfig:
    """Seven extreme points and six faces meeting like a projective plane minus a line."""

    points: np.ndarray
    vectors: np.ndarray | None = None
    incidence: tuple = INCIDENCE
    conics: tuple = ()
    spans: tuple = field(init=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(7, 5)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.vectors is not None:
            v = np.array(self.vectors, dtype=float).reshape(7, 3)
            v.setflags(write=False)
            object.__setattr__(self, "vectors", v)
        object.__setattr__(self, "spans", tuple(AffinePlane.through(*pts[list(t)]) for t in self.incidence))
        object.__setattr__(self, "conics", tuple(np.asarray(q, dtype=float) for q in self.conics))

    def span_coords(self, i, x):
        """Affine coordinates on the i-th span: origin at its first point, axes to the others."""
        t = self.incidence[i]
        base = self.points[t[0]]
        m = np.column_stack([self.points[t[1]] - base, self.points[t[2]] - base])
        sol, *_ = np.linalg.lstsq(m, (np.atleast_2d(x) - base).T, rcond=None)
        return sol.T

    def incidence_residual(self):
        return max(s.point_distance(p) for s, t in zip(self.spans, self.incidence) for p in self.points[list(t)])

    def general_position(self):
        return general_position_margin(homogenize(self.points))

    def to_dict(self):
        def enc(x):
            return str(int(x)) if float(x).is_integer() else repr(float(x))

        return {
            "points": [[enc(x) for x in row] for row in self.points],
            "incidence": [list(t) for t in self.incidence],
            "conics": [q.tolist() for q in self.conics],
            "vectors": None if self.vectors is None else self.vectors.tolist(),
        }

    @classmethod
    def from_dict(cls, doc):
        pts = np.array([[float(Fraction(x)) for x in row] for row in doc["points"]])
        return cls(pts, doc.get("vectors"), tuple(tuple(t) for t in doc["incidence"]), tuple(doc.get("conics", ())))


def configuration_vectors(rng):
    """Seven unit vectors of R^3 whose lines realise the incidence table."""
    v0, v1, v3 = rng.standard_normal((3, 3))
    v2 = rng.standard_normal() * v0 + rng.standard_normal() * v1
    v4 = rng.standard_normal() * v0 + rng.standard_normal() * v3
    v5 = np.cross(np.cross(v2, v3), np.cross(v1, v4))
    v6 = np.cross(np.cross(v0, v5), np.cross(v1, v3))
    vs = np.array([v0, v1, v2, v3, v4, v5, v6])
    return vs / np.linalg.norm(vs, axis=1, keepdims=True)


def _incidence_ok(vs, tol=1e-9):
    for t in INCIDENCE:
        if abs(np.linalg.det(vs[list(t)])) > tol:
            return False
    return True


def config_from_vectors(body: ProjectiveBody, vs, n_fit=12) -> SevenPointConfig:
    pts = body.extreme_point(vs)
    conics = []
    thetas = np.linspace(0, 2 * np.pi, n_fit, endpoint=False) + 0.1
    provisional = SevenPointConfig(pts, vs)
    for i, t in enumerate(INCIDENCE):
        w, _ = np.linalg.qr(np.column_stack([vs[t[0]], vs[t[1]]]))
        conics.append(fit_conic(provisional.span_coords(i, body.boundary(w, thetas))))
    return SevenPointConfig(pts, vs, INCIDENCE, tuple(conics))


def random_config(body: ProjectiveBody, rng, min_margin=1e-3, max_tries=200) -> SevenPointConfig:
    for _ in range(max_tries):
        vs = configuration_vectors(rng)
        if not _incidence_ok(vs):
            continue
        if general_position_margin(np.array([rank_one_svec(v) for v in vs])) > min_margin:
            return config_from_vectors(body, vs)
    raise R5Error("could not draw a configuration in general position")


class CanonicalBody(NamedTuple):
    body: ProjectiveBody
    config: SevenPointConfig
    normalization: np.ndarray


def canonical_body(seed=0, max_tries=2000, min_margin=1e-4) -> CanonicalBody:
    """Projective image of the trace slice of C_3(R) whose configuration sits at the
    normal-form points.

    No such image is bounded: the relation ``P6 = P1 + ... + P5 - 4 P0`` among the
    homogeneous normal-form points would force a rank-two PSD matrix to equal a
    positive combination of five rank-one matrices whose ranges span R^3.  The
    returned body therefore meets the hyperplane at infinity.
    """
    rng = np.random.default_rng(seed)
    target = homogenize(normal_form_points().astype(float))
    for _ in range(max_tries):
        vs = configuration_vectors(rng)
        if not _incidence_ok(vs):
            continue
        src = np.array([rank_one_svec(v) for v in vs])
        if general_position_margin(src) < min_margin:
            continue
        try:
            body = ProjectiveBody(frame_map(src, target))
        except (R5Error, np.linalg.LinAlgError):
            continue
        if np.linalg.cond(body.L) > 1e6:
            continue
        return CanonicalBody(body, config_from_vectors(body, vs), body.L)
    raise R5Error("no admissible canonical body found")


def random_body(rng, min_ratio=0.05, max_tries=1000) -> ProjectiveBody:
    """A bounded projective image of the trace slice (denominator positive definite)."""
    for _ in range(max_tries):
        m = rng.standard_normal((6, 6))
        n = rng.standard_normal((3, 3))
        n = n @ n.T + 0.5 * np.eye(3)
        m[5] = svec(n) * np.array([1, 1, 1, 2, 2, 2])
        body = ProjectiveBody(m)
        ev = np.linalg.eigvalsh(body.denominator)
        if ev[0] / ev[-1] > min_ratio and np.linalg.cond(body.L) < 1e4:
            return body
    raise R5Error("no admissible bounded body found")


# ---------------------------------------------------------------------------
# span checks


@dataclass(frozen=True)
class SpansCheck:
    passed: bool
    max_distance: float
    distances: tuple
    worst: int

    def __bool__(self):
        return self.passed


def spans_check(s: AffinePlane, body: ProjectiveBody, config: SevenPointConfig, n_samples=20, rng=None, tol=DIST_TOL):
    """Does ``s`` meet all six base spans and ``n_samples`` further face spans?"""
    rng = np.random.default_rng(0) if rng is None else rng
    others = list(config.spans) + [body.face_span(body.random_face(rng)) for _ in range(n_samples)]
    dists = tuple(s.distance(o) for o in others)
    worst = int(np.argmax(dists))
    return SpansCheck(dists[worst] < tol, dists[worst], dists, worst)


def intersection_params(s: AffinePlane, config: SevenPointConfig):
    """``PlaneParams`` of a plane meeting S1, S2, S3 (read off the three meeting points)."""
    x1 = s.intersect(config.spans[0])
    x2 = s.intersect(config.spans[1])
    x3 = s.intersect(config.spans[2])
    return PlaneParams(x1[0], x1[1], x2[2], x2[3], (x3[0] + x3[1] + x3[2] + x3[3]) / 4, x3[4])


def plane_on_line_branch(c, d, t):
    """A plane meeting all six base spans whose S1-point lies on the linear factor."""
    lin, _, _ = factor_condition_numeric(c, d)
    al, be, ga = lin[(1, 0)], lin[(0, 1)], lin[(0, 0)]
    direction = np.array([-be, al]) / np.hypot(al, be)
    foot = -ga * np.array([al, be]) / (al * al + be * be)
    a, b = foot + t * direction
    m = np.array(combined_matrix(a, b, c, d), dtype=float)
    null = np.linalg.svd(m)[2][-1]
    if abs(null[2]) < 1e-12:
        raise R5Error("no finite (e, f) for this point", witness={"a": a, "b": b, "c": c, "d": d})
    e, f = null[:2] / null[2]
    return PlaneParams(a, b, c, d, e, f)


# ---------------------------------------------------------------------------
# projective equivalence


@dataclass(frozen=True, eq=False)
class Equivalence:
    rho: np.ndarray
    images: np.ndarray
    diagnostics: dict

    def apply(self, pts):
        return apply_projective(self.rho, pts)


def _face_frame(body, config, face_index, anchor, orient):
    """Affine frame of a face: plane, and the map sending its boundary to the unit circle
    with ``anchor -> (1, 0)`` and ``orient`` in the upper half-plane."""
    t = config.incidence[face_index]
    vs = config.vectors
    if vs is not None:
        w, _ = np.linalg.qr(np.column_stack([vs[t[0]], vs[t[1]]]))
    else:
        w = body.face_through(config.points[t[0]], config.points[t[1]])
    plane = config.spans[face_index]
    samples = body.boundary(w, np.linspace(0, 2 * np.pi, 16, endpoint=False) + 0.05)
    q = fit_conic(plane.coords(samples))
    g, c = ellipse_frame(q)
    z = g @ (plane.coords(anchor)[0] - c)
    ang = np.arctan2(z[1], z[0])
    rot = np.array([[np.cos(ang), np.sin(ang)], [-np.sin(ang), np.cos(ang)]])
    g = rot @ g
    if (g @ (plane.coords(orient)[0] - c))[1] < 0:
        g = np.diag([1.0, -1.0]) @ g
    return plane, g, c, conic_residual(q, plane.coords(samples))


def projective_equivalence(body_a, config_a, body_b, config_b) -> Equivalence:
    """Projective map of RP^5 carrying faces of ``body_a`` to faces of ``body_b``.

    Follows the classical construction: identify the conic faces F1, F2 through
    p0 with those of B by affine maps fixing p0, transport p1..p4, rebuild
    F4', F5', F6' from point pairs, intersect spans for p5', p6', and take the
    projective frame map.
    """
    pa, pb = config_a.points, config_b.points
    diag = {}
    maps = []
    for face, orient in ((0, 1), (1, 3)):
        plane_a, ga, ca, ra = _face_frame(body_a, config_a, face, pa[0], pa[orient])
        plane_b, gb, cb, rb = _face_frame(body_b, config_b, face, pb[0], pb[orient])
        lin = plane_b.basis @ np.linalg.solve(gb, ga) @ plane_a.basis.T
        maps.append((plane_a.basis, lin))
        diag[f"conic_residual_F{face + 1}"] = max(ra, rb)
    u = np.column_stack([maps[0][0], maps[1][0]])

    def ell(x):
        s, *_ = np.linalg.lstsq(u, (np.atleast_2d(x) - pa[0]).T, rcond=None)
        return (pb[0][:, None] + maps[0][1] @ maps[0][0] @ s[:2] + maps[1][1] @ maps[1][0] @ s[2:]).T

    img = np.zeros((7, 5))
    img[0] = pb[0]
    img[1:5] = ell(pa[1:5])

    def span_of_pair(i, j):
        return body_b.face_span(body_b.face_through(img[i], img[j]))

    def pair_for(line):
        pair = [k for k in config_a.incidence[line] if 1 <= k <= 4]
        if len(pair) != 2:
            raise R5Error("incidence table does not single out a point pair", witness=config_a.incidence[line])
        return pair

    s4, s5, s6 = (span_of_pair(*pair_for(k)) for k in (3, 4, 5))
    img[5] = s4.intersect(s5)
    s3 = span_of_pair(0, 5)
    img[6] = s3.intersect(s6)
    rho = frame_map(homogenize(pa), homogenize(img))

    probe = pa[0] + (np.random.default_rng(1).standard_normal((8, 4)) @ u.T) * 0.1
    diag["restriction_residual"] = float(np.max(np.abs(apply_projective(rho, probe) - ell(probe))))
    diag["extreme_residual"] = body_b.extreme_residual(img)
    return Equivalence(rho, img, diag)


def face_preservation(eq: Equivalence, body_a, body_b, rng, n_faces=200):
    """Worst ``face_residual`` in B over images of sampled face spans of A."""
    worst = 0.0
    for _ in range(n_faces):
        pts = body_a.face_points(body_a.random_face(rng))
        worst = max(worst, body_b.face_residual(eq.apply(pts)))
    return worst


def random_affine(rng, lo=0.5, hi=2.0):
    """Random invertible affine map of R^5 with singular values in ``[lo, hi]``."""
    q1, _ = np.linalg.qr(rng.standard_normal((5, 5)))
    q2, _ = np.linalg.qr(rng.standard_normal((5, 5)))
    return q1 @ np.diag(rng.uniform(lo, hi, 5)) @ q2, rng.uniform(-1, 1, 5)
