"""Faces of the PSD cones C_n(F), F in {R, C, H}, and of their affine slices.

A face is stored through its range subspace: the face generated by a PSD matrix
``A`` is ``{B PSD : range(B) <= range(A)}``, so joins are subspace sums and meets
are subspace intersections.  All spectral work happens on the complex picture of
a matrix (real for R, complex for C, complex ``2n x 2n`` for H; see
:func:`modface.algebra.to_complex`).

Rank decisions use the cutoff ``sigma < RANK_CUTOFF * sigma_max``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.linalg

from .algebra import (
    FIELD_DIMS,
    HermitianMatrix,
    from_complex,
    multiplicity,
    to_complex,
)

RANK_CUTOFF = 1e-9
BISECTION_STEPS = 60


class FaceError(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


def _check_field(field):
    if field not in ("R", "C", "H"):
        raise ValueError(f"PSD cone faces are implemented for R, C, H; got {field!r}")


def _dtype(field):
    return float if field == "R" else complex


# ---------------------------------------------------------------------------
# subspaces of F^n (held in the complex picture)


def _orth(cols, cutoff=RANK_CUTOFF):
    if cols.shape[1] == 0:
        return cols
    u, s, _ = np.linalg.svd(cols, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return cols[:, :0]
    k = int(np.sum(s > cutoff * s[0]))
    return u[:, :k]


def quaternion_partner(u):
    """The antilinear quaternion structure ``J`` on C^{2n}: ``J u = S conj(u)``.

    ``S`` is block diagonal with blocks ``[[0, 1], [-1, 0]]``; it commutes with every
    realified quaternionic matrix, and ``u`` and ``J u`` are orthogonal.
    """
    v = np.conj(u)
    out = np.empty_like(v)
    out[0::2] = v[1::2]
    out[1::2] = -v[0::2]
    return out


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of F^n with an orthonormal basis in the complex picture.

    For F = H the stored basis spans a J-invariant subspace of C^{2n}; its
    quaternionic dimension is half the number of columns.
    """

    field: str
    n: int
    basis: np.ndarray

    def __post_init__(self):
        _check_field(self.field)
        b = np.asarray(self.basis, dtype=_dtype(self.field))
        ambient = self.n * multiplicity(self.field)
        if b.ndim != 2 or b.shape[0] != ambient:
            raise ValueError(f"basis must have {ambient} rows")
        if b.shape[1] % multiplicity(self.field):
            raise ValueError("quaternionic subspace has odd complex dimension")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @classmethod
    def span(cls, field, n, cols):
        cols = np.asarray(cols, dtype=_dtype(field)).reshape(n * multiplicity(field), -1)
        if field == "H" and cols.shape[1]:
            cols = np.hstack([cols, quaternion_partner(cols)])
        return cls(field, n, _orth(cols))

    @classmethod
    def zero(cls, field, n):
        return cls(field, n, np.zeros((n * multiplicity(field), 0), dtype=_dtype(field)))

    @classmethod
    def full(cls, field, n):
        return cls(field, n, np.eye(n * multiplicity(field), dtype=_dtype(field)))

    @property
    def ambient(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1] // multiplicity(self.field)

    def projector(self):
        return self.basis @ self.basis.conj().T

    def complement(self):
        p = np.eye(self.ambient) - self.projector()
        w, v = np.linalg.eigh(p)
        return Subspace(self.field, self.n, v[:, w > 0.5])

    def __add__(self, other):
        self._check(other)
        s = Subspace(self.field, self.n, _orth(np.hstack([self.basis, other.basis])))
        _check_even(s)
        return s

    def intersect(self, other):
        """``(U^perp + V^perp)^perp``."""
        self._check(other)
        return (self.complement() + other.complement()).complement()

    def contains(self, other, tol=1e-9):
        self._check(other)
        resid = other.basis - self.projector() @ other.basis
        return float(np.linalg.norm(resid, 2)) <= tol if resid.size else True

    def distance(self, other):
        """Spectral norm of the projector difference (1.0 when dimensions differ)."""
        self._check(other)
        if self.dim != other.dim:
            return 1.0
        return float(np.linalg.norm(self.projector() - other.projector(), 2))

    def _check(self, other):
        if self.field != other.field or self.n != other.n:
            raise FaceError("subspaces live in different spaces")

    def atoms(self):
        """Orthonormal F-basis, as complex-picture column blocks (one block per atom)."""
        if self.field != "H":
            return [self.basis[:, [k]] for k in range(self.basis.shape[1])]
        out = []
        rest = self.basis
        while rest.shape[1]:
            u = rest[:, 0] / np.linalg.norm(rest[:, 0])
            block = np.stack([u, quaternion_partner(u)], axis=1)
            out.append(block)
            rest = rest - block @ (block.conj().T @ rest)
            # the basis is orthonormal, so leftovers are either O(1) or round-off
            u_, s_, _ = np.linalg.svd(rest, full_matrices=False)
            rest = u_[:, s_ > 1e-6]
        return out

    def to_dict(self):
        b = self.basis
        return {
            "field": self.field,
            "n": self.n,
            "basis": {"re": np.real(b).tolist(), "im": np.imag(b).tolist()},
        }

    @classmethod
    def from_dict(cls, doc):
        field, n = doc["field"], int(doc["n"])
        rows = n * multiplicity(field)
        re = np.array(doc["basis"]["re"], dtype=float).reshape(rows, -1) if rows else np.zeros((0, 0))
        im = np.array(doc["basis"]["im"], dtype=float).reshape(re.shape)
        return cls(field, n, re if field == "R" else re + 1j * im)


def _check_even(s):
    if s.field == "H" and s.basis.shape[1] % 2:
        raise FaceError("quaternionic subspace lost its J-invariance (odd complex dimension)")


# ---------------------------------------------------------------------------
# faces of the cone


@dataclass(frozen=True, eq=False)
class Face:
    range: Subspace

    @property
    def field(self):
        return self.range.field

    @property
    def n(self):
        return self.range.n

    @property
    def rank(self):
        return self.range.dim

    def is_apex(self):
        return self.rank == 0

    def __le__(self, other):
        return other.range.contains(self.range)

    def distance(self, other):
        return self.range.distance(other.range)

    def same(self, other, tol=1e-9):
        return self.rank == other.rank and self.distance(other) < tol

    def generator(self):
        """A PSD matrix generating the face (the projector onto its range)."""
        return from_complex(self.field, self.range.projector())

    def contains_matrix(self, a: HermitianMatrix, tol=1e-9):
        """Membership of a PSD matrix: its range must lie inside the face's range."""
        x = to_complex(a)
        q = np.eye(x.shape[0]) - self.range.projector()
        scale = max(1.0, float(np.linalg.norm(x, 2)))
        return float(np.linalg.norm(q @ x, 2)) <= tol * scale

    def to_dict(self):
        return self.range.to_dict()


def apex(field, n):
    return Face(Subspace.zero(field, n))


def full_face(field, n):
    return Face(Subspace.full(field, n))


def face_from_vectors(field, n, cols):
    return Face(Subspace.span(field, n, cols))


def is_psd(a: HermitianMatrix, tol=1e-10) -> bool:
    """``lambda_min >= -tol * (1 + lambda_max)``."""
    if a.field == "O":
        raise ValueError("use modface.albert_plane.cone_member for octonionic matrices")
    w = np.linalg.eigvalsh(to_complex(a))
    return bool(w[0] >= -tol * (1.0 + max(w[-1], 0.0)))


def _range_of(x):
    w, v = np.linalg.eigh(x)
    top = max(float(np.max(np.abs(w))), 0.0) if w.size else 0.0
    if top == 0.0:
        return v[:, :0]
    return v[:, w > RANK_CUTOFF * top]


def face_of(a: HermitianMatrix, tol=1e-10) -> Face:
    """Face generated by a PSD matrix: range = (ker A)^perp."""
    _check_field(a.field)
    if not is_psd(a, tol):
        raise FaceError("matrix is not positive semidefinite", witness=np.linalg.eigvalsh(to_complex(a)).tolist())
    s = Subspace(a.field, a.n, _range_of(to_complex(a)))
    _check_even(s)
    return Face(s)


def _same_cone(f, g):
    if f.field != g.field or f.n != g.n:
        raise FaceError(f"faces of different cones: C_{f.n}({f.field}) vs C_{g.n}({g.field})")


def face_join(f: Face, g: Face) -> Face:
    _same_cone(f, g)
    return Face(f.range + g.range)


def face_meet(f: Face, g: Face) -> Face:
    _same_cone(f, g)
    return Face(f.range.intersect(g.range))


def modular_law_check(f: Face, g: Face, h: Face) -> bool:
    """``F v (G ^ H) == (F v G) ^ H`` for ``F <= H``.

    The left side is always contained in the right side, so equality of the
    integer ranks decides the question; containment is asserted as well.
    """
    _same_cone(f, g)
    _same_cone(f, h)
    if not f <= h:
        raise FaceError("modular law needs F <= H")
    left = face_join(f, face_meet(g, h))
    right = face_meet(face_join(f, g), h)
    return left.rank == right.rank and left <= right


def rank_identity_check(f: Face, g: Face) -> bool:
    return f.rank + g.rank == face_join(f, g).rank + face_meet(f, g).rank


def complement(f: Face) -> Face:
    return Face(f.range.complement())


def atoms(f: Face):
    """Rank-one subfaces along an orthonormal F-basis of the range."""
    return [Face(Subspace(f.field, f.n, block)) for block in f.range.atoms()]


# ---------------------------------------------------------------------------
# random faces


def random_face(rng, field, n, rank=None) -> Face:
    if rank is None:
        rank = int(rng.integers(0, n + 1))
    m = multiplicity(field)
    if rank == 0:
        return apex(field, n)
    cols = rng.standard_normal((n * m, rank))
    if field != "R":
        cols = cols + 1j * rng.standard_normal((n * m, rank))
    return face_from_vectors(field, n, cols)


def random_subface(rng, h: Face, rank=None) -> Face:
    """Random face below ``h``."""
    if rank is None:
        rank = int(rng.integers(0, h.rank + 1))
    if rank == 0:
        return apex(h.field, h.n)
    b = h.range.basis
    coeffs = rng.standard_normal((b.shape[1], rank))
    if h.field != "R":
        coeffs = coeffs + 1j * rng.standard_normal(coeffs.shape)
    return face_from_vectors(h.field, h.n, b @ coeffs)


def random_psd_in_face(rng, f: Face, rank=None) -> HermitianMatrix:
    """Random PSD matrix with range inside ``f`` (of full rank in ``f`` by default)."""
    sub = random_subface(rng, f, f.rank if rank is None else rank)
    atoms_ = sub.range.atoms()
    x = np.zeros((f.range.ambient, f.range.ambient), dtype=_dtype(f.field))
    for block in atoms_:
        x = x + rng.uniform(0.2, 1.0) * (block @ block.conj().T)
    return from_complex(f.field, x)


# ---------------------------------------------------------------------------
# slices


@dataclass(frozen=True, eq=False)
class SlicedBody:
    """``{A PSD : <M, A> = 1}``; compact exactly when ``M`` is positive definite."""

    functional: HermitianMatrix

    @classmethod
    def trace_slice(cls, field, n):
        return cls(HermitianMatrix.identity(field, n))

    @property
    def field(self):
        return self.functional.field

    @property
    def n(self):
        return self.functional.n

    def level(self, a: HermitianMatrix) -> float:
        return float(self.functional.inner(a))

    def is_compact(self, tol=1e-10):
        w = np.linalg.eigvalsh(to_complex(self.functional))
        return bool(w[0] > tol * max(1.0, w[-1]))

    def contains(self, a: HermitianMatrix, tol=1e-9) -> bool:
        return is_psd(a, tol) and abs(self.level(a) - 1.0) <= tol * (1.0 + abs(self.level(a)))

    def normalize(self, a: HermitianMatrix) -> HermitianMatrix:
        lev = self.level(a)
        if lev <= 0:
            raise FaceError("matrix does not meet the slicing hyperplane")
        return a / lev

    def face_is_bounded(self, f: Face) -> bool:
        """A face of the cone meets the slice in a compact set iff M is PD on its range."""
        if f.rank == 0:
            return False
        u = f.range.basis
        mw = u.conj().T @ to_complex(self.functional) @ u
        w = np.linalg.eigvalsh(mw)
        return bool(w[0] > RANK_CUTOFF * max(1.0, abs(w[-1])))

    def extreme_point(self, block) -> HermitianMatrix:
        """Slice point on the rank-one face spanned by a complex-picture atom block."""
        return self.normalize(from_complex(self.field, block @ block.conj().T))

    def random_point(self, rng, face=None) -> HermitianMatrix:
        f = face if face is not None else full_face(self.field, self.n)
        return self.normalize(random_psd_in_face(rng, f))

    def random_extreme_point(self, rng, face=None) -> HermitianMatrix:
        f = face if face is not None else full_face(self.field, self.n)
        return self.extreme_point(random_subface(rng, f, 1).range.basis)


def minimal_face_containing(a: HermitianMatrix, body: SlicedBody, tol=1e-9) -> Face:
    if not body.contains(a, tol):
        raise FaceError("point is not in the body", witness={"level": body.level(a)})
    return face_of(a, tol)


def face_barycenter(f: Face, body: SlicedBody) -> HermitianMatrix:
    """Centre of mass of ``f`` intersected with the slice.

    The linear change of variables ``A -> M_W^{1/2} A M_W^{1/2}`` carries the face
    onto the trace slice of C_k(F), whose centre is ``I/k`` by unitary symmetry;
    pulling back gives ``U (U* M U)^{-1} U* / k``.  For the trace slice this is the
    projector onto the range divided by its dimension.
    """
    if f.rank == 0:
        raise FaceError("the apex face is empty in a slice")
    if not body.face_is_bounded(f):
        raise FaceError("face is unbounded in this slice; no barycentre")
    u = f.range.basis
    mw = u.conj().T @ to_complex(body.functional) @ u
    x = u @ np.linalg.inv(mw) @ u.conj().T / f.rank
    return from_complex(f.field, (x + x.conj().T) / 2)


@dataclass(frozen=True, eq=False)
class RadialDecomposition:
    point: HermitianMatrix
    face: Face
    barycenter: HermitianMatrix
    boundary_point: HermitianMatrix
    lam: float

    def residual(self):
        recon = (1 - self.lam) * self.barycenter + self.lam * self.boundary_point
        return (recon - self.point).frobenius()


def _min_eig_on(u, x):
    return float(np.linalg.eigvalsh(u.conj().T @ x @ u)[0])


def radial_decompose(a: HermitianMatrix, body: SlicedBody) -> RadialDecomposition:
    """Write ``a = (1 - lam) b + lam p`` with ``b`` the barycentre of the minimal face
    of ``a`` and ``p`` where the ray from ``b`` through ``a`` leaves that face."""
    f = minimal_face_containing(a, body)
    b = face_barycenter(f, body)
    diff = to_complex(a) - to_complex(b)
    scale = max(1.0, (a.frobenius()))
    if np.linalg.norm(diff) <= 1e-12 * scale:
        return RadialDecomposition(a, f, b, a, 0.0)
    u = f.range.basis
    xb = to_complex(b)
    lo, hi = 1.0, 2.0
    while _min_eig_on(u, xb + hi * diff) >= 0:
        lo, hi = hi, 2 * hi
        if hi > 1e12:
            raise FaceError("ray does not leave the face (unbounded face)")
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if _min_eig_on(u, xb + mid * diff) >= 0:
            lo = mid
        else:
            hi = mid
    p = from_complex(a.field, xb + lo * diff)
    return RadialDecomposition(a, f, b, p, 1.0 / lo)


def image_face(vertex_map, f: Face, source: SlicedBody, target: SlicedBody, rng=None, spot_checks=2) -> Face:
    """Face of ``target`` generated by the images of the extreme points of ``f``.

    A face-preserving map sends the join of the atoms of ``f`` to the join of their
    images, so the atoms suffice; a few extra random extreme points of ``f`` are
    mapped as a spot check and must land in the same face.
    """
    images = [vertex_map(source.extreme_point(block)) for block in f.range.atoms()]
    total = images[0]
    for im in images[1:]:
        total = total + im
    g = face_of(total)
    if g.rank != f.rank:
        raise FaceError("vertex map changes the rank of a face", witness={"source_rank": f.rank, "image_rank": g.rank})
    if rng is not None:
        for _ in range(spot_checks):
            q = source.random_extreme_point(rng, f)
            if not g.contains_matrix(vertex_map(q), tol=1e-7):
                raise FaceError("vertex map sends a face to a non-face", witness={"face": f.to_dict()})
    return g


def radial_extend(vertex_map, a: HermitianMatrix, source: SlicedBody, target: SlicedBody | None = None, rng=None):
    """Extend a face-preserving map of extreme points to the whole body.

    ``phi(a) = (1 - lam) phi(b(a)) + lam phi(p(a))`` where ``phi(b(a))`` is the
    barycentre of the image face; ``p(a)`` lies in a face of smaller rank, so the
    recursion ends at extreme points, where ``vertex_map`` is used as is.
    """
    target = source if target is None else target
    f = minimal_face_containing(a, source)
    if f.rank == 1:
        return vertex_map(a)
    g = image_face(vertex_map, f, source, target, rng)
    dec = radial_decompose(a, source)
    phi_b = face_barycenter(g, target)
    if dec.lam == 0.0:
        return phi_b
    phi_p = radial_extend(vertex_map, dec.boundary_point, source, target, rng)
    return (1 - dec.lam) * phi_b + dec.lam * phi_p


# ---------------------------------------------------------------------------
# Hausdorff distance between faces of a slice


def random_direction(rng, field, n):
    """Random Hermitian matrix of unit norm for ``<D, D> = Re tr(D^2)``."""
    dim = FIELD_DIMS[field]
    a = rng.standard_normal((n, n, dim))
    adj = a.transpose(1, 0, 2).copy()
    adj[..., 1:] *= -1
    d = HermitianMatrix(field, (a + adj) / 2)
    return d / np.sqrt(d.inner(d))


def support_value(f: Face, body: SlicedBody, d: HermitianMatrix) -> float:
    """``max <D, A>`` over the face's slice: top generalised eigenvalue of (D_W, M_W)."""
    u = f.range.basis
    dw = u.conj().T @ to_complex(d) @ u
    mw = u.conj().T @ to_complex(body.functional) @ u
    return float(scipy.linalg.eigh(dw, mw, eigvals_only=True)[-1])


def hausdorff_distance(f: Face, g: Face, body: SlicedBody, n_dirs=500, seed=0, directions=()):
    """Sampled Hausdorff distance (Frobenius metric) via support functions.

    The sample of directions for ``n_dirs`` is a prefix of the sample for any larger
    ``n_dirs`` with the same seed, so the estimate never decreases as ``n_dirs`` grows.
    Extra ``directions`` are always included.
    """
    for h in (f, g):
        if h.rank == 0 or not body.face_is_bounded(h):
            raise FaceError("Hausdorff distance needs nonempty compact faces")
    rng = np.random.default_rng(seed)
    best = 0.0
    dirs = list(directions) + [random_direction(rng, body.field, body.n) for _ in range(n_dirs)]
    for d in dirs:
        d = d / np.sqrt(d.inner(d))
        best = max(best, abs(support_value(f, body, d) - support_value(g, body, d)))
    return best


# ---------------------------------------------------------------------------


def predicted_dimension(n_rank: int, d: int) -> int:
    """Dimension ``n(n-1)/2 * d + n - 1`` of a body whose faces form F P^{n-1}, dim F = d."""
    if n_rank < 2 or d not in (1, 2, 4, 8):
        raise ValueError("need n_rank >= 2 and d in {1, 2, 4, 8}")
    return n_rank * (n_rank - 1) // 2 * d + n_rank - 1


def hermitian_dimension(n: int, d: int) -> int:
    """Real dimension of H_n(F) counted coordinatewise: n diagonal reals plus d per off-diagonal pair."""
    return n + n * (n - 1) // 2 * d
