import json

import numpy as np
import pytest

from modface import albert_plane as ap
from modface.albert_plane import AlbertElement

E11, E22, E33 = (AlbertElement.unit(i) for i in range(3))
I = ap.IDENTITY


def offdiag(slot, k=0, value=1.0):
    v = np.zeros(8)
    v[k] = value
    zero = np.zeros(8)
    parts = {"x": zero, "y": zero, "z": zero}
    parts[slot] = v
    return AlbertElement(np.zeros(3), parts["x"], parts["y"], parts["z"])


def random_points(seed, k):
    rng = np.random.default_rng(seed)
    return [ap.random_point(rng) for _ in range(k)]


def test_char_coeffs_of_identity():
    assert ap.char_coeffs(I) == pytest.approx((3, 3, 1))


@pytest.mark.parametrize("a, b, c", [(1, 2, 3), (0.5, -1, 4), (0, 0, 0)])
def test_char_coeffs_of_diagonal(a, b, c):
    tr, sigma, det = ap.char_coeffs(AlbertElement.diagonal(a, b, c))
    assert (tr, sigma, det) == pytest.approx((a + b + c, a * b + b * c + a * c, a * b * c))


def test_determinant_with_octonionic_entries():
    # diag(1,1,1) plus unit entries in all three slots; the triple term uses Re((z x) y*)
    a = I + offdiag("x", 1, 0.5) + offdiag("y", 2, 0.5) + offdiag("z", 4, 0.5)
    m = a.matrix()
    assert np.allclose(m[2, 1], -m[1, 2])
    tr, sigma, det = ap.char_coeffs(a)
    assert tr == pytest.approx(3)
    assert sigma == pytest.approx(3 - 3 * 0.25)
    # e1 e2 = e3 and e3 * conj(e4) is orthogonal to 1, so the triple term vanishes
    assert det == pytest.approx(1 - 3 * 0.25)


def test_determinant_triple_term():
    # z = e1, x = e2, y = e3: (z x) conj(y) = e3 conj(e3) = 1
    a = I + offdiag("x", 2, 0.5) + offdiag("y", 3, 0.5) + offdiag("z", 1, 0.5)
    assert ap.freudenthal_det(a) == pytest.approx(1 - 3 * 0.25 + 2 * 0.125)


@pytest.mark.parametrize(
    "elem, expected",
    [(I, True), (AlbertElement.diagonal(1, 1, -1), False), (E11 + E22, True), (0 * I, True)],
)
def test_cone_membership(elem, expected):
    assert ap.cone_member(elem) is expected


def test_cone_member_of_rank_one_points():
    for p in random_points(1, 10):
        assert ap.cone_member(p)
        assert not ap.cone_member(p - 0.5 * I)


def test_idempotents():
    assert ap.is_idempotent(E11)
    assert not ap.is_idempotent(I / 2)
    assert ap.is_idempotent(E11 + E22)


def test_chart_examples():
    assert ap.chart_point(np.zeros(8), np.zeros(8)).distance(E33) < 1e-15
    e0 = np.eye(8)[0]
    expected = (E11 + E33 + offdiag("y", 0)) / 2
    assert ap.chart_point(e0, np.zeros(8)).distance(expected) < 1e-15


def test_chart_points_are_trace_one_idempotents():
    for p in random_points(2, 50):
        assert p.trace() == pytest.approx(1)
        assert ap.idempotent_residual(p) < 1e-12
        assert ap.eigenvalues(p) == pytest.approx([0, 0, 1], abs=1e-6)


def test_in_face_examples():
    assert ap.in_face(E11, E11 + E22)
    assert not ap.in_face(E33, E11 + E22)
    assert ap.in_face(E11, I)


def test_duality_examples():
    assert ap.duality_check(E11, E22)
    assert not ap.in_face(E11, ap.dual_line(E11))
    assert ap.in_face(E22, ap.dual_line(E11))
    with pytest.raises(ap.AlbertError):
        ap.dual_line(I / 3)


def test_duality_on_random_pairs():
    pts = random_points(3, 20)
    for a, b in zip(pts, pts[1:]):
        assert ap.duality_check(a, b)


def test_line_through_coordinate_points():
    assert ap.line_through(E11, E22).distance(AlbertElement.diagonal(1, 1, 0)) < 1e-12
    with pytest.raises(ap.AlbertError):
        ap.line_through(E11, E11)


def test_line_through_random_points():
    pts = random_points(4, 20)
    for p, q in zip(pts, pts[1:]):
        e = ap.line_through(p, q)
        assert e.trace() == pytest.approx(2)
        assert ap.idempotent_residual(e) < 1e-9
        assert ap.incidence_residual(p, e) < 1e-9
        assert ap.incidence_residual(q, e) < 1e-9


def test_meet_of_coordinate_lines():
    p = ap.meet_of_lines(AlbertElement.diagonal(1, 1, 0), AlbertElement.diagonal(1, 0, 1))
    assert p.distance(E11) < 1e-12
    line = AlbertElement.diagonal(1, 1, 0)
    with pytest.raises(ap.AlbertError):
        ap.meet_of_lines(line, line)


def test_meet_of_random_lines():
    pts = random_points(5, 40)
    for k in range(0, 40, 4):
        e1 = ap.line_through(pts[k], pts[k + 1])
        e2 = ap.line_through(pts[k + 2], pts[k + 3])
        p = ap.meet_of_lines(e1, e2)
        assert ap.idempotent_residual(p) < 1e-8
        assert ap.incidence_residual(p, e1) < 1e-8
        assert ap.incidence_residual(p, e2) < 1e-8


def test_ambient_dimension():
    assert ap.ambient_dimension() == 27
    assert ap.ambient_dimension() - 1 == 26


def test_serialisation_round_trip():
    p = random_points(6, 1)[0]
    back = AlbertElement.from_dict(json.loads(json.dumps(p.to_dict())))
    assert np.array_equal(back.coords(), p.coords())


def test_line_is_unique_through_any_two_of_its_points():
    pts = random_points(7, 30)
    for k in range(0, 30, 3):
        p, q, other = pts[k : k + 3]
        e = ap.line_through(p, q)
        # a third point on e: where e meets the line through two fresh points
        r = ap.meet_of_lines(e, ap.line_through(other, pts[(k + 4) % 30]))
        assert ap.line_through(p, r).distance(e) < 1e-7
        assert ap.line_through(q, r).distance(e) < 1e-7
