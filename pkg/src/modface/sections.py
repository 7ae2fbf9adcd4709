"""Sections of PSD cones by hyperplanes ``<M, A> = 1`` with ``M`` PSD.

When ``M`` is singular the section is unbounded.  Its recession cone is the
face of the cone with range ``ker M``; the rays of a face with range ``W`` come
from ``W cap ker M``.  Faces sharing a ray direction are parallel, and the
classes of parallel faces are the points at infinity of the projective closure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import HermitianMatrix, from_complex, multiplicity, to_complex
from .cone_faces import (
    RANK_CUTOFF,
    Face,
    SlicedBody,
    Subspace,
    face_meet,
    random_subface,
)

DIRECTION_TOL = 1e-8


class SectionError(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True, eq=False)
class SectionBody:
    """``{A PSD : <M, A> = 1}`` for a nonzero PSD functional ``M``."""

    functional: HermitianMatrix
    kernel: Subspace

    @property
    def field(self):
        return self.functional.field

    @property
    def n(self):
        return self.functional.n

    @property
    def compact(self):
        return self.kernel.dim == 0

    @property
    def sliced(self) -> SlicedBody:
        return SlicedBody(self.functional)

    def recession_face(self) -> Face:
        return Face(self.kernel)

    def face_recession(self, f: Face) -> Subspace:
        """``range(f) cap ker M``: the directions in which the face is unbounded."""
        return f.range.intersect(self.kernel)

    def meets(self, f: Face) -> bool:
        """Does the face of the cone reach the slicing hyperplane?"""
        return f.rank > 0 and not self.kernel.contains(f.range)

    def level(self, a: HermitianMatrix) -> float:
        return float(self.functional.inner(a))

    def to_dict(self):
        from .algebra import matrix_to_dict

        return {"functional": matrix_to_dict(self.functional), "compact": self.compact, "kernel_dim": self.kernel.dim}


def make_section(field, n, m) -> SectionBody:
    """Slice the PSD cone by ``<M, A> = 1``; ``M`` must be PSD and nonzero."""
    if not isinstance(m, HermitianMatrix):
        m = HermitianMatrix.from_real(field, np.asarray(m))
    if m.field != field or m.n != n:
        raise SectionError("functional does not match the cone", witness={"field": m.field, "n": m.n})
    x = to_complex(m)
    w, v = np.linalg.eigh(x)
    top = float(np.max(np.abs(w)))
    if top == 0.0:
        raise SectionError("zero functional: the slice is empty or the whole cone")
    if w[0] < -RANK_CUTOFF * top:
        raise SectionError("functional is not PSD", witness={"eigenvalues": w.tolist()})
    ker = v[:, w <= RANK_CUTOFF * top]
    return SectionBody(m, Subspace(field, n, ker))


def _block_projector(sub: Subspace):
    p = sub.projector()
    return p / np.real(np.trace(p))


def recession_rays(body: SectionBody, rng=None, n_samples=8):
    """Extreme rays of the recession cone as trace-normalised rank-one matrices.

    Empty for a compact section, the unique ray when ``ker M`` is one-dimensional,
    and otherwise ``n_samples`` sampled extreme rays of the face with range ``ker M``.
    """
    if body.compact:
        return []
    if body.kernel.dim == 1:
        return [from_complex(body.field, _block_projector(body.kernel))]
    rng = np.random.default_rng(0) if rng is None else rng
    rays = []
    for _ in range(n_samples):
        atom = random_subface(rng, Face(body.kernel), 1)
        rays.append(from_complex(body.field, _block_projector(atom.range)))
    return rays


@dataclass(frozen=True)
class RayCheck:
    applicable: bool
    passed: bool
    ray_dim: int
    spread: float

    def __bool__(self):
        return self.passed

    @property
    def status(self):
        return "not-applicable" if not self.applicable else ("pass" if self.passed else "fail")


def unique_ray_check(body: SectionBody, face: Face, n_dirs=20, rng=None) -> RayCheck:
    """Is the recession set of ``face`` a single ray?

    Decided by ``dim(range cap ker M) == 1`` and cross-checked by sampling PSD
    matrices in the face, compressing them to the kernel of ``M`` restricted to the
    range, and comparing their normalised directions.
    """
    rec = body.face_recession(face)
    if rec.dim == 0:
        return RayCheck(False, False, 0, 0.0)
    rng = np.random.default_rng(0) if rng is None else rng
    u = face.range.basis
    mw = u.conj().T @ to_complex(body.functional) @ u
    w, v = np.linalg.eigh(mw)
    kern = u @ v[:, w <= RANK_CUTOFF * max(1.0, float(np.max(np.abs(w))))]
    p = kern @ kern.conj().T
    dirs = []
    for _ in range(n_dirs):
        sub = random_subface(rng, face, face.rank)
        x = p @ sub.range.projector() @ p
        x = x * rng.uniform(0.5, 2.0)
        norm = np.linalg.norm(x)
        if norm > RANK_CUTOFF:
            dirs.append(x / np.real(np.trace(x)))
    spread = max((float(np.linalg.norm(d - dirs[0])) for d in dirs), default=0.0)
    passed = rec.dim == 1 and spread < DIRECTION_TOL and kern.shape[1] == multiplicity(body.field)
    return RayCheck(True, passed, rec.dim, spread)


def shared_direction_check(body: SectionBody, fa: Face, fb: Face) -> int:
    """Dimension of the common recession set of two faces."""
    return (fa.range.intersect(fb.range)).intersect(body.kernel).dim


def finitely_disjoint(body: SectionBody, fa: Face, fb: Face) -> bool:
    """True when the two faces have no common point in the section."""
    return not body.meets(face_meet(fa, fb))


@dataclass(frozen=True)
class ParallelClass:
    direction: np.ndarray
    members: tuple


def ray_direction(body: SectionBody, face: Face):
    rec = body.face_recession(face)
    if rec.dim != 1:
        raise SectionError("face does not have a unique ray", witness={"ray_dim": rec.dim})
    return _block_projector(rec)


def parallel_classes(body: SectionBody, faces, tol=DIRECTION_TOL):
    """Group non-compact faces by their ray direction."""
    if body.compact:
        raise SectionError("a compact section has no parallel classes")
    classes = []
    for idx, f in enumerate(faces):
        d = ray_direction(body, f)
        for k, cl in enumerate(classes):
            if np.linalg.norm(cl.direction - d) < tol:
                classes[k] = ParallelClass(cl.direction, cl.members + (idx,))
                break
        else:
            classes.append(ParallelClass(d, (idx,)))
    return classes


def _random_cols(rng, field, rows, k):
    cols = rng.standard_normal((rows, k))
    if field != "R":
        cols = cols + 1j * rng.standard_normal((rows, k))
    return cols


def random_line_face(body: SectionBody, rng, direction=None) -> Face:
    """A rank-two face with a single ray, optionally through a prescribed kernel vector."""
    if body.compact:
        raise SectionError("compact sections have no unbounded faces")
    m = multiplicity(body.field)
    if direction is None:
        direction = body.kernel.basis @ _random_cols(rng, body.field, body.kernel.basis.shape[1], 1)
    for _ in range(100):
        u = _random_cols(rng, body.field, body.n * m, 1)
        f = Face(Subspace.span(body.field, body.n, np.hstack([direction[:, :1], u])))
        if f.rank == 2 and body.face_recession(f).dim == 1:
            return f
    raise SectionError("could not draw a face with a single ray")


def sample_parallel_faces(body: SectionBody, rng, n_faces=40, n_directions=5):
    """Faces drawn through a few fixed kernel directions, with the direction labels."""
    dirs = [
        body.kernel.basis @ _random_cols(rng, body.field, body.kernel.basis.shape[1], 1) for _ in range(n_directions)
    ]
    labels = rng.integers(0, n_directions, n_faces)
    faces = [random_line_face(body, rng, dirs[k]) for k in labels]
    return faces, labels, dirs


@dataclass(frozen=True)
class AxiomStats:
    pairs: int
    pairs_on_common_line: int
    parallels: int
    unique_parallels: int
    same_direction: int


def affine_axiom_sampling(body: SectionBody, rng, n_trials=50, n_candidates=10) -> AxiomStats:
    """Sample the two affine-plane axioms on a rank-two-line geometry.

    * two extreme points lie on a common line face;
    * through a point off a line ``F`` exactly one constructible line misses ``F``
      in the section, and it shares ``F``'s ray.
    """
    if body.n != 3 or body.compact:
        raise SectionError("the affine-plane axioms are sampled on non-compact sections with n = 3")
    m = multiplicity(body.field)
    on_line = unique = same = 0
    for _ in range(n_trials):
        p, q = (_random_cols(rng, body.field, body.n * m, 1) for _ in range(2))
        line = Face(Subspace.span(body.field, body.n, np.hstack([p, q])))
        pf = Face(Subspace.span(body.field, body.n, p))
        qf = Face(Subspace.span(body.field, body.n, q))
        if line.rank == 2 and pf <= line and qf <= line and body.meets(pf) and body.meets(qf):
            on_line += 1

        f = random_line_face(body, rng)
        ray = body.face_recession(f).basis[:, :1]
        par = Face(Subspace.span(body.field, body.n, np.hstack([p, ray])))
        candidates = [par]
        for _ in range(n_candidates):
            y = f.range.basis @ _random_cols(rng, body.field, f.range.basis.shape[1], 1)
            candidates.append(Face(Subspace.span(body.field, body.n, np.hstack([p, y]))))
        disjoint = [c for c in candidates if finitely_disjoint(body, f, c)]
        if len(disjoint) == 1 and disjoint[0] is par:
            unique += 1
            if shared_direction_check(body, f, par) == 1:
                same += 1
    return AxiomStats(n_trials, on_line, n_trials, unique, same)
