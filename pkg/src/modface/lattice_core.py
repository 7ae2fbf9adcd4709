"""Explicit finite lattices and exact face lattices of small polytopes.

Everything here is exact: polytope vertices are :class:`fractions.Fraction`
tuples, and lattice questions (modularity, irreducibility, isomorphism) are
settled by exhaustive search under hard size caps.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

MAX_POLYTOPE_DIM = 5
MAX_VERTICES = 12
MAX_PRODUCT = 4096
MAX_IRREDUCIBLE = 512
MAX_ISOMORPHISM = 64


class LatticeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteLattice:
    """A finite lattice given by its order table ``leq[i, j] = (i <= j)``.

    Meet and join tables are derived on construction; a non-lattice order raises.
    ``labels`` is optional bookkeeping (e.g. the vertex set of each face).
    """

    leq: np.ndarray
    labels: tuple = ()
    tables: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        leq = np.array(self.leq, dtype=bool)
        m = leq.shape[0]
        if leq.shape != (m, m) or m == 0:
            raise LatticeError("order table must be a nonempty square matrix")
        if not np.all(np.diag(leq)):
            raise LatticeError("order is not reflexive")
        if np.any(leq & leq.T & ~np.eye(m, dtype=bool)):
            raise LatticeError("order is not antisymmetric")
        # transitivity: leq o leq <= leq
        comp = (leq.astype(np.int64) @ leq.astype(np.int64)) > 0
        if np.any(comp & ~leq):
            raise LatticeError("order is not transitive")
        leq.setflags(write=False)
        object.__setattr__(self, "leq", leq)
        object.__setattr__(self, "labels", tuple(self.labels))
        tables = self.tables if self.tables is not None else _meet_join_tables(leq)
        object.__setattr__(self, "tables", None)
        object.__setattr__(self, "_tables", tables)

    @property
    def size(self):
        return self.leq.shape[0]

    def __len__(self):
        return self.size

    @property
    def meet(self):
        return self._tables[0]

    @property
    def join(self):
        return self._tables[1]

    @property
    def bottom(self):
        return self._tables[2]

    @property
    def top(self):
        return self._tables[3]

    def atoms(self):
        return [i for i in range(self.size) if i != self.bottom and self.height(i) == 1]

    def heights(self):
        """Length of the longest chain from the bottom to each element."""
        order = sorted(range(self.size), key=lambda i: int(self.leq[:, i].sum()))
        h = [0] * self.size
        for j in order:
            below = [i for i in range(self.size) if self.leq[i, j] and i != j]
            h[j] = 1 + max((h[i] for i in below), default=-1)
        return h

    def height(self, i):
        return self.heights()[i]

    def covers(self):
        """Boolean matrix ``c[i, j]``: j covers i."""
        lt = self.leq & ~np.eye(self.size, dtype=bool)
        between = (lt.astype(np.int64) @ lt.astype(np.int64)) > 0
        return lt & ~between

    def interval(self, lo, hi):
        return [i for i in range(self.size) if self.leq[lo, i] and self.leq[i, hi]]

    def is_atomic(self):
        at = self.atoms()
        for x in range(self.size):
            acc = self.bottom
            for a in at:
                if self.leq[a, x]:
                    acc = self.join[acc, a]
            if acc != x:
                return False
        return True

    def is_complemented(self):
        m, j = self.meet, self.join
        return all(
            any(m[x, y] == self.bottom and j[x, y] == self.top for y in range(self.size)) for x in range(self.size)
        )

    def to_dict(self):
        return {"size": self.size, "leq": self.leq.astype(int).tolist(), "labels": [list(map(str, lab)) if isinstance(lab, (tuple, frozenset)) else str(lab) for lab in self.labels]}

    @classmethod
    def from_dict(cls, doc):
        return cls(np.array(doc["leq"], dtype=bool))


def _meet_join_tables(leq):
    m = leq.shape[0]
    cnt_below = leq.sum(axis=0)  # number of elements below each element
    meet = np.empty((m, m), dtype=np.int64)
    join = np.empty((m, m), dtype=np.int64)
    for i in range(m):
        lower = leq[:, i][:, None] & leq  # lower[k, j]: k <= i and k <= j
        upper = leq[i, :][:, None] & leq.T  # upper[k, j]: i <= k and j <= k
        if not (lower.any(axis=0).all() and upper.any(axis=0).all()):
            raise LatticeError(f"element {i} lacks a common bound with some element")
        g = np.argmax(np.where(lower, cnt_below[:, None], -1), axis=0)
        lub = np.argmin(np.where(upper, cnt_below[:, None], m + 1), axis=0)
        if np.any(lower & ~leq[:, g]):
            raise LatticeError(f"element {i} lacks a greatest lower bound with some element")
        if np.any(upper & ~leq[lub, :].T):
            raise LatticeError(f"element {i} lacks a least upper bound with some element")
        meet[i] = g
        join[i] = lub
    bottom = int(np.flatnonzero(leq.all(axis=1))[0])
    top = int(np.flatnonzero(leq.all(axis=0))[0])
    meet.setflags(write=False)
    join.setflags(write=False)
    return meet, join, bottom, top


def lattice_from_sets(sets, labels=None):
    """Lattice of a family of frozensets ordered by inclusion."""
    sets = list(sets)
    leq = np.array([[a <= b for b in sets] for a in sets], dtype=bool)
    return FiniteLattice(leq, tuple(labels if labels is not None else sets))


def chain(k):
    return FiniteLattice(np.triu(np.ones((k, k), dtype=bool)))


def boolean_lattice(k):
    subsets = [frozenset(s) for r in range(k + 1) for s in itertools.combinations(range(k), r)]
    return lattice_from_sets(subsets)


def diamond_m3():
    """0 < a, b, c < 1."""
    leq = np.eye(5, dtype=bool)
    leq[0, :] = True
    leq[:, 4] = True
    return FiniteLattice(leq, ("0", "a", "b", "c", "1"))


def pentagon_n5():
    """0 < a < b < 1 and 0 < c < 1: the smallest non-modular lattice."""
    leq = np.eye(5, dtype=bool)
    leq[0, :] = True
    leq[:, 4] = True
    leq[1, 2] = True
    return FiniteLattice(leq, ("0", "a", "b", "c", "1"))


# ---------------------------------------------------------------------------
# lattice properties


def is_modular(lat: FiniteLattice):
    """Exhaustive check of ``F v (G ^ H) == (F v G) ^ H`` over all ``F <= H``.

    Returns ``(True, None)`` or ``(False, (F, G, H))`` with the first violation.
    """
    meet, join = lat.meet, lat.join
    for f, h in zip(*np.nonzero(lat.leq)):
        left = join[f, meet[:, h]]
        right = meet[join[f, :], h]
        bad = np.flatnonzero(left != right)
        if bad.size:
            return False, (int(f), int(bad[0]), int(h))
    return True, None


def rank_function_check(lat: FiniteLattice):
    """Height satisfies ``h(x) + h(y) == h(x v y) + h(x ^ y)`` for all pairs."""
    h = np.array(lat.heights())
    return bool(np.all(h[:, None] + h[None, :] == h[lat.join] + h[lat.meet]))


def direct_product(l1: FiniteLattice, l2: FiniteLattice) -> FiniteLattice:
    """Product order on pairs; element ``(i, j)`` has index ``i * len(l2) + j``."""
    if l1.size * l2.size > MAX_PRODUCT:
        raise LatticeError(f"product would have {l1.size * l2.size} > {MAX_PRODUCT} elements")
    leq = np.kron(l1.leq.astype(np.int8), l2.leq.astype(np.int8)).astype(bool)
    labels = tuple((a, b) for a in range(l1.size) for b in range(l2.size))
    m2 = l2.size

    def combine(t1, t2):
        t = (t1[:, None, :, None] * m2 + t2[None, :, None, :]).reshape(leq.shape)
        t.setflags(write=False)
        return t

    tables = (
        combine(l1.meet, l2.meet),
        combine(l1.join, l2.join),
        l1.bottom * m2 + l2.bottom,
        l1.top * m2 + l2.top,
    )
    return FiniteLattice(leq, labels, tables)


def _factor_map_is_iso(lat, u, v):
    meet, join = lat.meet, lat.join
    x = np.arange(lat.size)
    if np.any(join[meet[x, u], meet[x, v]] != x):
        return False
    below_u = np.flatnonzero(lat.leq[:, u])
    below_v = np.flatnonzero(lat.leq[:, v])
    ab = join[np.ix_(below_u, below_v)]
    return bool(np.all(meet[ab, u] == below_u[:, None]) and np.all(meet[ab, v] == below_v[None, :]))


def is_irreducible(lat: FiniteLattice):
    """Search for a factorisation ``L = [0, u] x [0, v]`` through a complementary pair.

    Returns ``(True, None)`` when no factorisation exists, ``(False, (u, v))`` when
    one does, and ``(None, None)`` ("undecided") beyond the size cap.
    """
    if lat.size > MAX_IRREDUCIBLE:
        return None, None
    bot, top = lat.bottom, lat.top
    for u in range(lat.size):
        if u in (bot, top):
            continue
        for v in range(u + 1, lat.size):
            if v in (bot, top) or lat.meet[u, v] != bot or lat.join[u, v] != top:
                continue
            if _factor_map_is_iso(lat, u, v):
                return False, (u, v)
    return True, None


def sublattice(lat: FiniteLattice, elements):
    idx = list(elements)
    return FiniteLattice(lat.leq[np.ix_(idx, idx)])


def lattice_isomorphic(l1: FiniteLattice, l2: FiniteLattice, return_map=False):
    """Backtracking search for an order isomorphism (bijections respecting height and
    up/down cover degrees)."""
    if l1.size != l2.size:
        return (False, None) if return_map else False
    if l1.size > MAX_ISOMORPHISM:
        raise LatticeError(f"isomorphism search is capped at {MAX_ISOMORPHISM} elements")

    def signature(lat):
        c = lat.covers()
        h = lat.heights()
        return [(h[i], int(c[:, i].sum()), int(c[i, :].sum()), int(lat.leq[:, i].sum())) for i in range(lat.size)]

    s1, s2 = signature(l1), signature(l2)
    if sorted(s1) != sorted(s2):
        return (False, None) if return_map else False
    order = sorted(range(l1.size), key=lambda i: s1[i])
    candidates = {i: [j for j in range(l2.size) if s2[j] == s1[i]] for i in order}
    mapping = {}
    used = set()

    def consistent(i, j):
        for a, b in mapping.items():
            if l1.leq[a, i] != l2.leq[b, j] or l1.leq[i, a] != l2.leq[j, b]:
                return False
        return True

    def search(k):
        if k == len(order):
            return True
        i = order[k]
        for j in candidates[i]:
            if j in used or not consistent(i, j):
                continue
            mapping[i] = j
            used.add(j)
            if search(k + 1):
                return True
            del mapping[i]
            used.discard(j)
        return False

    found = search(0)
    if return_map:
        return found, (dict(mapping) if found else None)
    return found


# ---------------------------------------------------------------------------
# exact polytopes


def _frac_vec(v):
    return tuple(Fraction(c) for c in v)


@dataclass(frozen=True)
class PolytopeV:
    """Full-dimensional polytope in Q^d given by its vertices."""

    vertices: tuple

    def __post_init__(self):
        verts = tuple(_frac_vec(v) for v in self.vertices)
        if not verts:
            raise LatticeError("polytope needs at least one vertex")
        d = len(verts[0])
        if any(len(v) != d for v in verts):
            raise LatticeError("vertices have different dimensions")
        if d > MAX_POLYTOPE_DIM or len(verts) > MAX_VERTICES:
            raise LatticeError(f"size caps: dimension <= {MAX_POLYTOPE_DIM}, vertices <= {MAX_VERTICES}")
        if len(set(verts)) != len(verts):
            raise LatticeError("repeated vertex")
        object.__setattr__(self, "vertices", verts)

    @property
    def dim(self):
        return len(self.vertices[0])

    def to_dict(self):
        return {"vertices": [[f"{c.numerator}/{c.denominator}" for c in v] for v in self.vertices]}

    @classmethod
    def from_dict(cls, doc):
        return cls(tuple(tuple(Fraction(c) for c in v) for v in doc["vertices"]))


def _rank(rows):
    """Rank of a list of Fraction rows by Gaussian elimination."""
    m = [list(r) for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                f = m[r][col] / m[rank][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def _nullvector(rows, ncols):
    """A nonzero vector orthogonal to the given rows (which must have rank ncols - 1)."""
    m = [list(r) for r in rows]
    pivots = []
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = 1 / m[rank][col]
        m[rank] = [a * inv for a in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        pivots.append(col)
        rank += 1
    free = next(c for c in range(ncols) if c not in pivots)
    x = [Fraction(0)] * ncols
    x[free] = Fraction(1)
    for r, col in enumerate(pivots):
        x[col] = -m[r][free]
    return x


def facets(p: PolytopeV):
    """Vertex index sets of the facets, from supporting hyperplanes through affinely
    independent d-subsets of vertices."""
    d = p.dim
    verts = p.vertices
    if d == 0:
        return []
    found = set()
    for subset in itertools.combinations(range(len(verts)), d):
        base = verts[subset[0]]
        diffs = [[a - b for a, b in zip(verts[i], base)] for i in subset[1:]]
        if diffs and _rank(diffs) < d - 1:
            continue
        normal = _nullvector(diffs, d) if diffs else [Fraction(1)]
        offset = sum(a * b for a, b in zip(normal, base))
        vals = [sum(a * b for a, b in zip(normal, v)) - offset for v in verts]
        if all(x <= 0 for x in vals) or all(x >= 0 for x in vals):
            found.add(frozenset(i for i, x in enumerate(vals) if x == 0))
    return sorted(found, key=lambda s: sorted(s))


def face_sets(p: PolytopeV):
    """All faces as vertex index sets: closure of the facets under intersection, plus P."""
    verts = p.vertices
    d = p.dim
    if len(verts) > 1:
        diffs = [[a - b for a, b in zip(v, verts[0])] for v in verts[1:]]
        if _rank(diffs) != d:
            raise LatticeError("polytope is not full-dimensional in its ambient space")
    elif d != 0:
        raise LatticeError("a single point must be given in dimension 0")
    top = frozenset(range(len(verts)))
    faces = {top, frozenset()}
    frontier = set(facets(p))
    while frontier:
        faces |= frontier
        new = set()
        for a in frontier:
            for b in faces:
                c = a & b
                if c not in faces:
                    new.add(c)
        frontier = new
    for i in range(len(verts)):
        if frozenset([i]) not in faces:
            raise LatticeError(f"vertex {i} is not an extreme point (input not in convex position)")
    return sorted(faces, key=lambda s: (len(s), sorted(s)))


def face_lattice_of_polytope(p: PolytopeV) -> FiniteLattice:
    sets = face_sets(p)
    return lattice_from_sets(sets, labels=[tuple(sorted(s)) for s in sets])


def star_join(p1: PolytopeV, p2: PolytopeV) -> PolytopeV:
    """Convex hull of ``p1`` placed at ``(x, 0, 0)`` and ``p2`` at ``(0, y, 1)``.

    The affine spans of the two copies are disjoint and share no direction.
    """
    d1, d2 = p1.dim, p2.dim
    zero1 = (Fraction(0),) * d1
    zero2 = (Fraction(0),) * d2
    verts = [v + zero2 + (Fraction(0),) for v in p1.vertices]
    verts += [zero1 + w + (Fraction(1),) for w in p2.vertices]
    return PolytopeV(tuple(verts))


# ---------------------------------------------------------------------------
# named corpus


def _simplex(d):
    verts = [(0,) * d] + [tuple(1 if i == j else 0 for i in range(d)) for j in range(d)]
    return PolytopeV(tuple(verts))


CORPUS = {
    "point": lambda: PolytopeV(((),)),
    "segment": lambda: _simplex(1),
    "simplex2": lambda: _simplex(2),
    "simplex3": lambda: _simplex(3),
    "simplex4": lambda: _simplex(4),
    "square": lambda: PolytopeV(((0, 0), (1, 0), (1, 1), (0, 1))),
    "pentagon": lambda: PolytopeV(((0, 0), (2, 0), (3, 2), (1, 3), (-1, 2))),
    "cube": lambda: PolytopeV(tuple(itertools.product((0, 1), repeat=3))),
    "octahedron": lambda: PolytopeV(
        ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1))
    ),
}
CORPUS["triangle"] = CORPUS["simplex2"]


def corpus_polytope(name) -> PolytopeV:
    try:
        return CORPUS[name]()
    except KeyError:
        raise LatticeError(f"unknown corpus polytope {name!r}; choose from {sorted(CORPUS)}") from None
