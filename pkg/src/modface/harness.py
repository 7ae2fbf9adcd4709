"""Seeded verification suites and their reports.

Each suite is a list of checks; a check runs independent trials, each with its
own generator ``default_rng([root_seed, salt, trial])``.  Results are reduced
with ``max`` and ``sum`` only, so thread-parallel and serial runs agree.
"""

from __future__ import annotations

import json
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import albert_plane as ap
from . import cone_faces as cf
from . import lattice_core as lc
from . import rp5_model as r5
from . import sections as sec
from .algebra import HermitianMatrix, eigvalsh, from_complex, quaternion_matrix_to_complex, random_psd, to_complex

SCHEMA = "modface.report/1"
COMMANDS = ("verify-cone", "verify-lattice", "verify-albert", "r5", "sections", "all")
FIELDS = ("R", "C", "H", "O")


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    field: str = "R"
    n: int = 3
    trials: int = 100
    seed: int = 0
    tol: float | None = None
    shape: str = "all"
    workers: int = 1

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.field not in FIELDS:
            raise UsageError(f"unknown field {self.field!r}")
        if self.field == "O" and self.n != 3:
            raise UsageError("octonionic matrices exist only for n = 3")
        if self.command == "verify-cone" and self.field == "O":
            raise UsageError("the octonionic cone is handled by verify-albert")
        if self.command == "verify-albert" and (self.field != "O" or self.n != 3):
            raise UsageError("verify-albert works on H3(O); use --field O --n 3 or omit them")
        if not 1 <= self.n <= 8:
            raise UsageError("n must lie in 1..8")
        if self.trials < 1:
            raise UsageError("trials must be positive")
        if self.shape != "all" and self.shape not in lc.CORPUS:
            raise UsageError(f"unknown shape {self.shape!r}; choose from {sorted(lc.CORPUS)} or all")
        return self

    def to_dict(self):
        return {
            "command": self.command,
            "field": self.field,
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "tol": self.tol,
            "shape": self.shape,
        }


@dataclass
class Report:
    check: str
    field: str
    n: int
    trials: int
    failures: int
    max_residual: float
    seed: int
    witness: object = None
    elapsed: float = 0.0
    residuals: tuple = field(default=(), repr=False)

    @property
    def passed(self):
        return self.failures == 0

    def to_dict(self):
        # elapsed is left out so that replays are byte-identical
        out = {
            "check": self.check,
            "field": self.field,
            "n": self.n,
            "trials": self.trials,
            "failures": self.failures,
            "max_residual": float(self.max_residual),
            "seed": self.seed,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status}  {self.check:<26} field={self.field} n={self.n} trials={self.trials} "
            f"failures={self.failures} max_residual={self.max_residual:.3e}  ({self.elapsed:.2f}s)"
        )


def trial_rng(seed, salt, trial):
    return np.random.default_rng([int(seed), int(salt), int(trial)])


def _salt(name):
    return zlib.crc32(name.encode())


def run_check(name, trial_fn, trials, seed, field="-", n=0, workers=1):
    """Run ``trial_fn(rng) -> (residual, ok, witness)`` over seeded trials."""
    salt = _salt(name)
    start = time.perf_counter()

    def one(k):
        return trial_fn(trial_rng(seed, salt, k))

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, range(trials)))
    else:
        results = [one(k) for k in range(trials)]
    residuals = tuple(float(r) for r, _, _ in results)
    failures = sum(1 for _, ok, _ in results if not ok)
    witness = next((w for _, ok, w in results if not ok), None)
    return Report(
        name,
        field,
        n,
        trials,
        failures,
        max(residuals, default=0.0),
        seed,
        _jsonable(witness),
        time.perf_counter() - start,
        residuals,
    )


def _jsonable(x):
    if x is None or isinstance(x, (bool, int, str)):
        return x
    if isinstance(x, float):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return str(x)


# ---------------------------------------------------------------------------
# cone faces


def _meet_oracle(a: HermitianMatrix, b: HermitianMatrix):
    """Common range of two PSD matrices as the fixed space of both range projectors."""
    pa = cf.face_of(a).range.projector()
    pb = cf.face_of(b).range.projector()
    eye = np.eye(pa.shape[0])
    stack = np.vstack([eye - pa, eye - pb])
    _, s, vh = np.linalg.svd(stack)
    s = np.concatenate([s, np.zeros(vh.shape[0] - s.size)])
    basis = vh[s < 1e-6].conj().T
    return cf.Subspace(a.field, a.n, basis)


def random_pair(rng, field, n):
    """Two random PSD matrices; half the time the second shares part of the first's range."""
    a = random_psd(rng, field, n, int(rng.integers(0, n + 1)))
    fa = cf.face_of(a)
    if rng.random() < 0.5 and fa.rank > 0:
        g = cf.face_join(cf.random_subface(rng, fa), cf.random_face(rng, field, n))
        b = cf.random_psd_in_face(rng, g) if g.rank else HermitianMatrix.zeros(field, n)
    else:
        b = random_psd(rng, field, n, int(rng.integers(0, n + 1)))
    return a, b


def cone_pair_trial(rng, field, n, tol=1e-9):
    a, b = random_pair(rng, field, n)
    fa, fb = cf.face_of(a), cf.face_of(b)
    j, m = cf.face_join(fa, fb), cf.face_meet(fa, fb)
    res = max(j.distance(cf.face_of(a + b)), m.range.distance(_meet_oracle(a, b)))
    ok = res <= tol and cf.rank_identity_check(fa, fb)
    return res, ok, None if ok else {"ranks": [fa.rank, fb.rank, j.rank, m.rank], "residual": res}


def modular_trial(rng, field, n):
    h = cf.random_face(rng, field, n)
    f = cf.random_subface(rng, h)
    g = cf.random_face(rng, field, n)
    ok = cf.modular_law_check(f, g, h)
    return 0.0 if ok else 1.0, ok, None if ok else {"ranks": [f.rank, g.rank, h.rank]}


def radial_trial(rng, field, n, tol=1e-9):
    body = cf.SlicedBody.trace_slice(field, n)
    face = cf.random_face(rng, field, n, int(rng.integers(1, n + 1)))
    a = body.random_point(rng, face)
    dec = cf.radial_decompose(a, body)
    res = dec.residual()
    ok = res <= tol and 0.0 <= dec.lam <= 1.0 + 1e-12
    return res, ok, None if ok else {"lam": dec.lam, "residual": res}


def identity_extension_trial(rng, field, n, tol=1e-9):
    body = cf.SlicedBody.trace_slice(field, n)
    a = body.random_point(rng, cf.random_face(rng, field, n, int(rng.integers(1, n + 1))))
    res = (cf.radial_extend(lambda x: x, a, body) - a).frobenius()
    return res, res <= tol, None if res <= tol else {"residual": res}


def random_unitary(rng, field, n):
    """Random unitary in the complex picture (orthogonal over R, symplectic-type over H)."""
    if field == "H":
        a = quaternion_matrix_to_complex(rng.standard_normal((n, n, 4)))
    elif field == "C":
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    else:
        a = rng.standard_normal((n, n))
    # polar factor; stays inside the *-algebra of the field
    w, v = np.linalg.eigh(a.conj().T @ a)
    return a @ (v / np.sqrt(w)) @ v.conj().T


def conjugation_map(field, q):
    def phi(x: HermitianMatrix) -> HermitianMatrix:
        return from_complex(field, q @ to_complex(x) @ q.conj().T)

    return phi


def conjugation_extension_trial(rng, field, n, tol=1e-9):
    body = cf.SlicedBody.trace_slice(field, n)
    phi = conjugation_map(field, random_unitary(rng, field, n))
    a = body.random_point(rng, cf.random_face(rng, field, n, int(rng.integers(1, n + 1))))
    res = (cf.radial_extend(phi, a, body, rng=rng) - phi(a)).frobenius()
    return res, res <= tol, None if res <= tol else {"residual": res}


def cone_suite(cfg: RunConfig):
    field, n, t = cfg.field, cfg.n, cfg.trials
    tol = cfg.tol or 1e-9
    w = cfg.workers
    reports = [
        run_check("join_meet", lambda r: cone_pair_trial(r, field, n, tol), t, cfg.seed, field, n, w),
        run_check("modular_law", lambda r: modular_trial(r, field, n), t, cfg.seed, field, n, w),
        run_check("radial_decomposition", lambda r: radial_trial(r, field, n, tol), t, cfg.seed, field, n, w),
        run_check("identity_extension", lambda r: identity_extension_trial(r, field, n, tol), t, cfg.seed, field, n, w),
    ]
    reports.append(
        run_check("conjugation_extension", lambda r: conjugation_extension_trial(r, field, n, tol), t, cfg.seed, field, n, w)
    )
    return reports, {}


# ---------------------------------------------------------------------------
# lattices


MODULAR_SHAPES = {"point", "segment", "simplex2", "simplex3", "simplex4", "triangle"}


def lattice_report(name, seed=0):
    start = time.perf_counter()
    lat = lc.face_lattice_of_polytope(lc.corpus_polytope(name))
    modular, witness = lc.is_modular(lat)
    expected = name in MODULAR_SHAPES
    failures = int(modular != expected)
    wit = None
    if witness is not None:
        f, g, h = witness
        lab = lat.labels
        left = lat.join[f, lat.meet[g, h]]
        right = lat.meet[lat.join[f, g], h]
        wit = {
            "F": list(lab[f]),
            "G": list(lab[g]),
            "H": list(lab[h]),
            "F v (G ^ H)": list(lab[left]),
            "(F v G) ^ H": list(lab[right]),
        }
        failures += int(left == right or not lat.leq[f, h])
    failures += int(not lat.is_atomic()) + int(not lat.is_complemented())
    rep = Report(f"lattice[{name}]", "Q", lat.size, 1, failures, 0.0, seed, wit, time.perf_counter() - start)
    return rep, lat


def lemma_one_report(names=("point", "segment", "triangle"), seed=0):
    start = time.perf_counter()
    failures, bad = 0, None
    pairs = 0
    for a in names:
        for b in names:
            pa, pb = lc.corpus_polytope(a), lc.corpus_polytope(b)
            joined = lc.face_lattice_of_polytope(lc.star_join(pa, pb))
            prod = lc.direct_product(lc.face_lattice_of_polytope(pa), lc.face_lattice_of_polytope(pb))
            pairs += 1
            if not lc.lattice_isomorphic(joined, prod):
                failures += 1
                bad = bad or [a, b]
    return Report("star_join_product", "Q", 0, pairs, failures, 0.0, seed, bad, time.perf_counter() - start)


def lattice_suite(cfg: RunConfig):
    names = sorted(set(lc.CORPUS) - {"triangle"}) if cfg.shape == "all" else [cfg.shape]
    reports, lattices = [], {}
    for name in names:
        rep, lat = lattice_report(name, cfg.seed)
        reports.append(rep)
        lattices[name] = lat
    reports.append(lemma_one_report(seed=cfg.seed))
    return reports, {"lattices": lattices}


# ---------------------------------------------------------------------------
# Albert algebra


def chart_trial(rng, tol=1e-10):
    p = ap.random_point(rng)
    tr, sigma, det = ap.char_coeffs(p)
    res_idem = max(ap.idempotent_residual(p), abs(tr - 1))
    res_inv = max(abs(sigma), abs(det))
    ok = res_idem < tol and res_inv <= 1e-9
    return max(res_idem, res_inv), ok, None if ok else p.to_dict()


def duality_trial(rng):
    a = ap.random_point(rng)
    if rng.random() < 0.5:
        b = ap.random_point(rng)
    else:
        # a point on the dual line of a, so both memberships hold
        b = ap.meet_of_lines(ap.dual_line(a), ap.dual_line(ap.random_point(rng)))
    ok = ap.duality_check(a, b)
    return 0.0 if ok else 1.0, ok, None if ok else {"a": a.to_dict(), "b": b.to_dict()}


def line_trial(rng, tol=1e-9):
    p, q = ap.random_point(rng), ap.random_point(rng)
    e = ap.line_through(p, q)
    res = max(
        ap.incidence_residual(p, e),
        ap.incidence_residual(q, e),
        ap.idempotent_residual(e),
        abs(e.trace() - 2),
    )
    return res, res <= tol, None if res <= tol else {"residual": res}


def meet_trial(rng, tol=1e-9):
    p, q, r = ap.random_point(rng), ap.random_point(rng), ap.random_point(rng)
    e1, e2 = ap.line_through(p, q), ap.line_through(p, r)
    m = ap.meet_of_lines(e1, e2)
    res = max(m.distance(p), ap.incidence_residual(m, e1), ap.incidence_residual(m, e2), ap.idempotent_residual(m))
    return res, res <= tol, None if res <= tol else {"residual": res}


def albert_suite(cfg: RunConfig):
    t, s, w = cfg.trials, cfg.seed, cfg.workers
    reports = [
        run_check("chart_points", lambda r: chart_trial(r, cfg.tol or 1e-10), t, s, "O", 3, w),
        run_check("duality", duality_trial, t, s, "O", 3, w),
        run_check("line_through", lambda r: line_trial(r, cfg.tol or 1e-9), t, s, "O", 3, w),
        run_check("meet_of_lines", lambda r: meet_trial(r, cfg.tol or 1e-9), t, s, "O", 3, w),
    ]
    return reports, {}


# ---------------------------------------------------------------------------
# the five-dimensional body


def random_rational(rng, lo=-40, hi=40, den=25):
    while True:
        x = Fraction(int(rng.integers(lo, hi + 1)), int(rng.integers(1, den + 1)))
        if x != 0:
            return x


def factor_trial(rng):
    c, d = random_rational(rng), random_rational(rng)
    try:
        fz = r5.factor_condition(c, d)
    except r5.R5Error as err:
        return 1.0, False, err.witness
    ok = fz.exact and fz.linear.degree() == 1 and fz.quadratic.degree() == 2
    return 0.0 if ok else 1.0, ok, None if ok else fz.to_dict()


def face_span_trial(rng, body, config, n_samples=20, tol=r5.DIST_TOL):
    s = body.face_span(body.random_face(rng))
    chk = r5.spans_check(s, body, config, n_samples, rng, tol)
    return chk.max_distance, chk.passed, None if chk.passed else {"worst": chk.worst, "distance": chk.max_distance}


def random_plane_trial(rng, body, config, tol=r5.DIST_TOL):
    chk = r5.spans_check(r5.random_plane(rng, 2.0), body, config, 0, rng, tol)
    # a random plane should miss some base span
    ok = not chk.passed
    return 0.0 if ok else chk.max_distance, ok, None if ok else {"distances": chk.distances}


def boundary_conic_trial(rng, body, config, face_index, n_fit=6, n_test=100, tol=1e-7):
    t = config.incidence[face_index]
    vs = config.vectors
    w, _ = np.linalg.qr(np.column_stack([vs[t[0]], vs[t[1]]]))
    fit = body.boundary(w, rng.uniform(0, 2 * np.pi, n_fit))
    test = body.boundary(w, rng.uniform(0, 2 * np.pi, n_test))
    plane = config.spans[face_index]
    q = r5.fit_conic(plane.coords(fit))
    res = r5.conic_residual(q, plane.coords(test))
    return res, res < tol, None if res < tol else {"face": face_index, "residual": res}


def equivalence_trial(rng, n_faces=200, tol=1e-7):
    body_a = r5.random_body(rng)
    cfg_a = r5.random_config(body_a, rng)
    t, shift = r5.random_affine(rng)
    body_b = body_a.transformed(t, shift)
    cfg_b = r5.random_config(body_b, rng)
    eq = r5.projective_equivalence(body_a, cfg_a, body_b, cfg_b)
    res = r5.face_preservation(eq, body_a, body_b, rng, n_faces)
    return res, res < tol, None if res < tol else {"residual": res, **eq.diagnostics}


def r5_suite(cfg: RunConfig):
    t, s, w = cfg.trials, cfg.seed, cfg.workers
    start = time.perf_counter()
    table = r5.fidelity_table()
    mism = [row for row in table if not row["match"]]
    fidelity = Report(
        "printed_matrix_fidelity", "Q", 3, 9, len(mism), 0.0, s, mism or None, time.perf_counter() - start
    )
    start = time.perf_counter()
    derived = r5.derive_incidence()
    incidence = Report(
        "incidence_table",
        "Q",
        7,
        1,
        int(derived != r5.INCIDENCE),
        0.0,
        s,
        None if derived == r5.INCIDENCE else [list(x) for x in derived],
        time.perf_counter() - start,
    )
    canon = r5.canonical_body(s)
    body, config = canon.body, canon.config
    span_tol = cfg.tol or r5.DIST_TOL
    reports = [
        fidelity,
        incidence,
        run_check("factorization", factor_trial, t, s, "Q", 5, w),
        run_check("face_spans_pass", lambda r: face_span_trial(r, body, config, tol=span_tol), t, s, "R", 5, w),
        run_check("random_planes_fail", lambda r: random_plane_trial(r, body, config, span_tol), t, s, "R", 5, w),
    ]
    for i in range(6):
        reports.append(
            run_check(
                f"boundary_conic[F{i + 1}]",
                lambda r, i=i: boundary_conic_trial(r, body, config, i, tol=cfg.tol or 1e-7),
                1,
                s,
                "R",
                5,
            )
        )
    reports.append(
        run_check(
            "projective_equivalence",
            lambda r: equivalence_trial(r, tol=cfg.tol or 1e-7),
            max(1, t // 10),
            s,
            "R",
            5,
            w,
        )
    )
    extras = {"fidelity": table, "incidence": derived, "canonical": canon, "reverse": reverse_branch_stats(canon, s)}
    return reports, extras


def reverse_branch_stats(canon, seed, n=20):
    """Planes through the linear-factor branch meet the six base spans but are not
    face spans; report how many fail the sampled span check."""
    rng = np.random.default_rng([seed, 99])
    body, config = canon.body, canon.config
    meets_base = fails_sampled = 0
    for _ in range(n):
        c, d = rng.uniform(-2, 2, 2)
        try:
            plane = r5.plane_from_params(r5.plane_on_line_branch(c, d, rng.uniform(-2, 2)))
        except r5.R5Error:
            continue
        base = max(plane.distance(sp) for sp in config.spans)
        meets_base += base < 1e-6
        fails_sampled += not r5.spans_check(plane, body, config, 10, rng).passed
    return {"planes": n, "meet_all_base_spans": int(meets_base), "fail_sampled_spans": int(fails_sampled)}


# ---------------------------------------------------------------------------
# sections


def compactness_trial(rng, field, n):
    rank = int(rng.integers(1, n + 1))
    m = random_psd(rng, field, n, rank)
    body = sec.make_section(field, n, m)
    w = eigvalsh(m)
    pd = bool(w[0] > 1e-9 * w[-1])
    ok = body.compact == pd == (rank == n)
    res = 0.0
    if ok and not body.compact:
        # walking far along a recession ray stays in the body
        ray = sec.recession_rays(body, rng, 1)[0]
        far = body.sliced.random_point(rng) + ray * 1e6
        res = abs(body.level(far) - 1.0)
        ok = res < 1e-6 and cf.is_psd(far / 1e6)
    elif ok:
        # trace is bounded by 1 / lambda_min(M) on the body
        a = body.sliced.random_point(rng)
        res = max(0.0, float(a.trace()) - 1 / w[0]) * w[0]
        ok = res <= 1e-9
    return res, ok, None if ok else {"rank": rank, "compact": body.compact, "pd": pd}


def e11_section(field, n):
    return sec.make_section(field, n, HermitianMatrix.diag(field, [1] + [0] * (n - 1)))


def unique_ray_trial(rng, field, n):
    body = e11_section(field, n)
    chk = sec.unique_ray_check(body, sec.random_line_face(body, rng), rng=rng)
    return chk.spread, chk.passed, None if chk.passed else {"status": chk.status, "ray_dim": chk.ray_dim}


def shared_direction_trial(rng, field, n):
    body = e11_section(field, n)
    fa = sec.random_line_face(body, rng)
    if rng.random() < 0.5:
        ray = body.face_recession(fa).basis[:, :1]
        fb = sec.random_line_face(body, rng, ray)
    else:
        fb = sec.random_line_face(body, rng)
    k = sec.shared_direction_check(body, fa, fb)
    return float(k), k <= 1, None if k <= 1 else {"shared": k}


def parallel_class_trial(rng, field="R", n=3, n_faces=30, n_directions=5):
    """Classes of sampled faces against the extreme points of the cut-off face."""
    body = e11_section(field, n)
    faces, labels, dirs = sec.sample_parallel_faces(body, rng, n_faces, n_directions)
    classes = sec.parallel_classes(body, faces)
    used = sorted(set(labels.tolist()))
    cut_off = body.recession_face()
    res = 0.0
    ok = len(classes) == len(used)
    reps = []
    for cl in classes:
        lab = set(labels[list(cl.members)].tolist())
        ok = ok and len(lab) == 1
        d = dirs[lab.pop()]
        proj = d @ d.conj().T
        if field == "H":
            proj = cf.Subspace.span(field, n, d).projector()
        proj = proj / np.real(np.trace(proj))
        res = max(res, float(np.linalg.norm(proj - cl.direction)))
        rep = from_complex(field, cl.direction)
        ok = ok and cut_off.contains_matrix(rep) and cf.face_of(rep).rank == 1
        reps.append(cl.direction)
        # members of one class never meet inside the section
        for i in cl.members[:3]:
            for j in cl.members[:3]:
                if i < j:
                    ok = ok and sec.finitely_disjoint(body, faces[i], faces[j])
    for i in range(len(reps)):
        for j in range(i):
            ok = ok and np.linalg.norm(reps[i] - reps[j]) > 1e-6
    ok = ok and res < 1e-8
    return res, ok, None if ok else {"classes": len(classes), "directions": len(used)}


def sections_suite(cfg: RunConfig):
    field, n, t, s, w = cfg.field, cfg.n, cfg.trials, cfg.seed, cfg.workers
    reports = [run_check("compactness", lambda r: compactness_trial(r, field, n), t, s, field, n, w)]
    if n >= 2:
        reports += [
            run_check("unique_ray", lambda r: unique_ray_trial(r, field, n), t, s, field, n, w),
            run_check("shared_direction", lambda r: shared_direction_trial(r, field, n), t, s, field, n, w),
            run_check("parallel_classes", lambda r: parallel_class_trial(r, field, n), max(1, t // 10), s, field, n, w),
        ]
    extras = {}
    if n == 3:
        body = e11_section(field, n)
        stats = sec.affine_axiom_sampling(body, np.random.default_rng([s, 7]), 20)
        start = time.perf_counter()
        fails = (stats.pairs - stats.pairs_on_common_line) + (stats.parallels - stats.unique_parallels)
        fails += stats.unique_parallels - stats.same_direction
        reports.append(
            Report("affine_axioms", field, n, stats.pairs, fails, 0.0, s, None, time.perf_counter() - start)
        )
        extras["axioms"] = stats.__dict__
        extras["recession_rays"] = [_jsonable(to_complex(x)) for x in sec.recession_rays(body, np.random.default_rng(s), 3)]
        extras["kernel_dim"] = body.kernel.dim
    return reports, extras


# ---------------------------------------------------------------------------


SUITES = {
    "verify-cone": cone_suite,
    "verify-lattice": lattice_suite,
    "verify-albert": albert_suite,
    "r5": r5_suite,
    "sections": sections_suite,
}


@dataclass
class RunResult:
    config: RunConfig
    reports: list
    extras: dict

    @property
    def passed(self):
        return all(r.passed for r in self.reports)

    def to_dict(self):
        out = {
            "schema": SCHEMA,
            "config": self.config.to_dict(),
            "passed": self.passed,
            "reports": [r.to_dict() for r in self.reports],
        }
        if "fidelity" in self.extras:
            out["fidelity"] = _jsonable(self.extras["fidelity"])
        if "incidence" in self.extras:
            out["incidence"] = _jsonable(self.extras["incidence"])
        if "reverse" in self.extras:
            out["reverse_branch"] = self.extras["reverse"]
        if "axioms" in self.extras:
            out["axioms"] = self.extras["axioms"]
            out["recession_rays"] = self.extras["recession_rays"]
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def run(cfg: RunConfig) -> RunResult:
    cfg.validate()
    if cfg.command == "all":
        reports, extras = [], {}
        for cmd, suite in SUITES.items():
            sub = RunConfig(
                cmd,
                "O" if cmd == "verify-albert" else ("R" if cfg.field == "O" else cfg.field),
                3 if cmd in ("verify-albert", "r5") else cfg.n,
                cfg.trials,
                cfg.seed,
                cfg.tol,
                cfg.shape,
                cfg.workers,
            )
            r, e = suite(sub)
            reports += r
            extras.update(e)
        return RunResult(cfg, reports, extras)
    reports, extras = SUITES[cfg.command](cfg)
    return RunResult(cfg, reports, extras)
