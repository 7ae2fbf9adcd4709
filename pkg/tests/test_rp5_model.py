import json
from fractions import Fraction

import numpy as np
import pytest
import sympy

from modface import rp5_model as r5
from modface.polynomials import Poly

A, B, C, D, E, F = sympy.symbols("a b c d e f")
SYMS = dict(zip(r5.VARS, (A, B, C, D, E, F)))


def to_sympy(p: Poly):
    out = 0
    for exp, c in p.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for name, k in zip(p.vars, exp):
            term *= SYMS[name] ** k
        out += term
    return sympy.expand(out)


def span_condition_oracle(triple):
    """Independent determinant for 'the parametrised plane meets span(p_i, p_j, p_k)'.

    The span is cut out by three affine equations n.x = n.p; substituting
    x = r u1 + s u2 + t u3 with r + s + t = 1 gives a homogeneous system in (r, s, t).
    """
    pts = sympy.Matrix(r5.normal_form_points()[list(triple)].tolist())
    p, q, r = pts.row(0), pts.row(1), pts.row(2)
    normals = sympy.Matrix.vstack(q - p, r - p).nullspace()
    gens = [sympy.Matrix([[A, B, 0, 0, 0]]), sympy.Matrix([[0, 0, C, D, 0]]), sympy.Matrix([[E, E, E, E, F]])]
    rows = [[(n.T * g.T)[0] - (n.T * p.T)[0] for g in gens] for n in normals]
    return sympy.expand(sympy.Matrix(rows).det())


@pytest.fixture(scope="module")
def canon():
    return r5.canonical_body(0)


def test_normal_form_points():
    pts = r5.normal_form_points()
    assert pts.shape == (7, 5)
    assert all(isinstance(x, Fraction) for x in pts.ravel())
    assert list(pts[0]) == [0] * 5 and list(pts[6]) == [1] * 5
    assert r5.general_position_margin(r5.homogenize(pts.astype(float))) > 0.01


def test_plane_from_params_examples():
    s = r5.plane_from_params(r5.PlaneParams(1, 0, 1, 0, 0, 0))
    for x in (np.eye(5)[0], np.eye(5)[2], np.zeros(5)):
        assert s.point_distance(x) < 1e-14
    through_p6 = r5.plane_from_params(r5.PlaneParams(1, 0, 1, 0, 1, 1))
    assert through_p6.point_distance(np.ones(5)) < 1e-14
    with pytest.raises(r5.R5Error):
        r5.plane_from_params(r5.PlaneParams(0, 0, 0, 0, 0, 0))


def test_generated_plane_meets_first_three_spans(canon):
    rng = np.random.default_rng(0)
    for _ in range(10):
        s = r5.plane_from_params(r5.PlaneParams(*rng.standard_normal(6)))
        for span in canon.config.spans[:3]:
            assert s.distance(span) < 1e-10


def test_condition_four_at_origin():
    p = r5.det_condition_poly(4).subs({"e": 0, "f": 0})
    assert to_sympy(p) == -A * D


@pytest.mark.parametrize("i", [4, 5, 6])
def test_conditions_are_linear_in_e_and_f(i):
    p = to_sympy(r5.det_condition_poly(i))
    assert sympy.diff(p, E, E) == 0 and sympy.diff(p, F, F) == 0 and sympy.diff(p, E, F) == 0


@pytest.mark.parametrize("i, triple", list(zip((4, 5, 6), r5.INCIDENCE[3:])))
def test_conditions_match_independent_derivation(i, triple):
    ours = to_sympy(r5.det_condition_poly(i))
    ratio = sympy.simplify(span_condition_oracle(triple) / ours)
    assert ratio.is_number and ratio != 0


def test_derived_incidence_table():
    assert r5.derive_incidence() == r5.INCIDENCE
    # each of p1..p4 lies on exactly one of the last three lines, and p5 on two
    last = r5.INCIDENCE[3:]
    assert [sum(j in t for t in last) for j in range(7)] == [0, 2, 1, 2, 1, 2, 1]


@pytest.mark.parametrize("i", [4, 5, 6])
def test_condition_vanishes_iff_plane_meets_span(i):
    rng = np.random.default_rng(i)
    pts = r5.normal_form_points().astype(float)
    span = r5.AffinePlane.through(*pts[list(r5.INCIDENCE[i - 1])])
    poly = r5.det_condition_poly(i)
    for _ in range(10):
        a, b, c, d, e = rng.standard_normal(5)
        # solve the (linear) condition for f
        g = poly.subs({"a": Fraction(a), "b": Fraction(b), "c": Fraction(c), "d": Fraction(d), "e": Fraction(e)})
        f = -float(g.coefficient("f", 0).constant()) / float(g.coefficient("f", 1).constant())
        assert r5.plane_from_params(r5.PlaneParams(a, b, c, d, e, f)).distance(span) < 1e-8
        off = r5.PlaneParams(a, b, c, d, e, f + 0.5)
        assert abs(float(r5.det_condition_i(off, i))) > 1e-6
        assert r5.plane_from_params(off).distance(span) > 1e-6


def test_printed_matrix_fidelity():
    table = r5.fidelity_table()
    assert len(table) == 9
    assert all(row["match"] for row in table), [row for row in table if not row["match"]]


def test_printed_first_row_against_sympy():
    p = span_condition_oracle(r5.INCIDENCE[3])
    # fix the overall scale by the constant term -ad
    p = sympy.expand(-p / sympy.Poly(p.subs({E: 0, F: 0}), A, D).coeff_monomial(A * D))
    row = [sympy.diff(p, E), sympy.diff(p, F), p.subs({E: 0, F: 0})]
    expected = [-A * C + 2 * A * D - B * D + A + D, A * D, -A * D]
    assert [sympy.expand(x - y) for x, y in zip(row, expected)] == [0, 0, 0]


def test_combined_condition_is_determinant_of_combined_matrix():
    rng = np.random.default_rng(2)
    for _ in range(5):
        vals = [Fraction(int(x), 7) for x in rng.integers(-20, 20, 4)]
        m = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in r5.combined_matrix(*vals)])
        assert m.det() == r5.combined_condition(*vals)


def test_combined_condition_zero_iff_system_singular():
    # on a zero of the cubic the (e, f, 1) system has a solution
    c, d = 2.0, 3.0
    plane = r5.plane_on_line_branch(c, d, 0.7)
    m = np.array(r5.combined_matrix(plane.a, plane.b, c, d), dtype=float)
    assert abs(np.linalg.det(m)) < 1e-9
    assert np.allclose(m @ np.array([plane.e, plane.f, 1.0]), 0, atol=1e-9)
    m2 = np.array(r5.combined_matrix(0.3, 0.4, c, d), dtype=float)
    assert np.linalg.matrix_rank(m2) == 3


def test_factorisation_at_two_three():
    fz = r5.factor_condition(2, 3)
    assert fz.exact and fz.remainder.is_zero()
    assert fz.cubic.degree() == 3 and fz.linear.degree() == 1 and fz.quadratic.degree() == 2
    a, b = sympy.symbols("a b")
    q = sympy.expand(to_sympy(r5.combined_condition_poly()).subs({C: 2, D: 3, E: 0, F: 0}))
    factors = [f for f, _ in sympy.factor_list(q)[1]]
    assert sorted(sympy.Poly(f, A, B).total_degree() for f in factors) == [1, 2]


@pytest.mark.parametrize("c, d", [(1, 1), (Fraction(-3, 4), Fraction(5, 2)), (7, -2), (Fraction(1, 3), Fraction(1, 9))])
def test_factorisation_product_re_expands(c, d):
    fz = r5.factor_condition(c, d)
    assert fz.exact
    assert (fz.linear * fz.quadratic - fz.cubic).is_zero()


def test_canonical_body_matches_normal_form(canon):
    cfg = canon.config
    assert np.abs(cfg.points - r5.normal_form_points().astype(float)).max() < 1e-10
    assert cfg.incidence_residual() < 1e-10
    assert not canon.body.bounded
    assert canon.body.extreme_residual(cfg.points) < 1e-10


def face_range(cfg, i):
    t = cfg.incidence[i]
    w, _ = np.linalg.qr(np.column_stack([cfg.vectors[t[0]], cfg.vectors[t[1]]]))
    return w


@pytest.mark.parametrize("i", range(6))
def test_face_boundaries_are_conics(canon, i):
    rng = np.random.default_rng(i)
    body, cfg = canon.body, canon.config
    w = face_range(cfg, i)
    plane = cfg.spans[i]
    q = r5.fit_conic(plane.coords(body.boundary(w, rng.uniform(0, 2 * np.pi, 6))))
    assert r5.conic_residual(q, plane.coords(body.boundary(w, rng.uniform(0, 2 * np.pi, 100)))) < 1e-8


def test_first_face_boundary_lies_on_quadratic_factor(canon):
    body, cfg = canon.body, canon.config
    rng = np.random.default_rng(3)
    b1 = body.boundary(face_range(cfg, 0), rng.uniform(0, 2 * np.pi, 50))
    b2 = body.boundary(face_range(cfg, 1), rng.uniform(0, 2 * np.pi, 5))
    for y in b2:
        lin, quad, res = r5.factor_condition_numeric(y[2], y[3])
        assert res < 1e-12
        scale = max(abs(v) for v in quad.values())
        on_quad = [abs(sum(v * a ** i * b ** j for (i, j), v in quad.items())) / scale for a, b in b1[:, :2]]
        off_lin = [abs(sum(v * a ** i * b ** j for (i, j), v in lin.items())) for a, b in b1[:, :2]]
        assert max(on_quad) < 1e-10
        assert min(off_lin) > 1e-3


def test_spans_check_examples(canon):
    body, cfg = canon.body, canon.config
    rng = np.random.default_rng(4)
    assert r5.spans_check(body.face_span(body.random_face(rng)), body, cfg, 20, rng)
    assert not r5.spans_check(r5.random_plane(rng, 2.0), body, cfg, 0, rng)


def test_spans_check_fails_when_one_base_span_is_missed(canon):
    body, cfg = canon.body, canon.config
    rng = np.random.default_rng(5)
    # a plane meeting S1..S5 but not S6: perturb a face span off S6 along its normal
    s = body.face_span(body.random_face(rng))
    _, y, _ = s.closest(cfg.spans[5])
    chk = r5.spans_check(s, body, cfg, 0, rng)
    assert chk.passed
    normal = np.linalg.svd(np.column_stack([s.basis, cfg.spans[5].basis]).T)[2][-1]
    shifted = r5.AffinePlane(s.origin + 1e-3 * normal, s.basis)
    chk = r5.spans_check(shifted, body, cfg, 0, rng)
    assert not chk.passed and chk.worst == 5


def test_identical_bodies_give_identity():
    rng = np.random.default_rng(6)
    body = r5.random_body(rng)
    cfg = r5.random_config(body, rng)
    eq = r5.projective_equivalence(body, cfg, body, cfg)
    rho = eq.rho / eq.rho[5, 5]
    assert np.allclose(rho, np.eye(6), atol=1e-7)


def test_equivalence_of_affine_image_preserves_faces():
    rng = np.random.default_rng(7)
    body_a = r5.random_body(rng)
    cfg_a = r5.random_config(body_a, rng)
    t, shift = r5.random_affine(rng)
    body_b = body_a.transformed(t, shift)
    cfg_b = r5.random_config(body_b, rng)
    eq = r5.projective_equivalence(body_a, cfg_a, body_b, cfg_b)
    assert r5.face_preservation(eq, body_a, body_b, rng, 50) < 1e-7
    assert body_b.extreme_residual(eq.apply(body_a.random_extreme_point(rng, 200))) < 1e-7


def test_equivalence_is_functorial_on_face_spans():
    rng = np.random.default_rng(8)
    bodies = [r5.random_body(rng)]
    for _ in range(2):
        t, shift = r5.random_affine(rng)
        bodies.append(bodies[0].transformed(t, shift))
    cfgs = [r5.random_config(b, rng) for b in bodies]
    ab = r5.projective_equivalence(bodies[0], cfgs[0], bodies[1], cfgs[1])
    bc = r5.projective_equivalence(bodies[1], cfgs[1], bodies[2], cfgs[2])
    composed = r5.Equivalence(bc.rho @ ab.rho, None, {})
    assert r5.face_preservation(composed, bodies[0], bodies[2], rng, 50) < 1e-7


def test_serialisation_round_trips(canon):
    cfg = canon.config
    back = r5.SevenPointConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert np.allclose(back.points, cfg.points, atol=1e-15)
    assert back.incidence == cfg.incidence
    body = r5.ProjectiveBody.from_dict(json.loads(json.dumps(canon.body.to_dict())))
    assert np.array_equal(body.L, canon.body.L)
    s = cfg.spans[0]
    assert r5.AffinePlane.from_dict(s.to_dict()).distance(s) < 1e-14
    fz = r5.factor_condition(2, 3).to_dict()
    assert json.loads(json.dumps(fz)) == fz


def test_bad_condition_index():
    with pytest.raises(r5.R5Error):
        r5.condition_matrix(3)
