from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from modface.algebra import (
    AlgebraElement,
    HermitianMatrix,
    approx_equal,
    cd_conjugate,
    cd_multiply,
    eigvalsh,
    from_complex,
    matrix_from_dict,
    matrix_to_dict,
    mul_arrays,
    norm,
    norm_squared,
    quaternion_matrix_to_complex,
    random_hermitian,
    random_psd,
    realify,
    real_part,
    structure_constants,
    to_complex,
)

coeff = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def element(dim):
    return arrays(float, dim, elements=coeff).map(lambda a: AlgebraElement(tuple(a)))


def units(dim):
    return [AlgebraElement.unit(dim, k) for k in range(dim)]


def test_quaternion_units():
    i, j, k = units(4)[1:]
    assert cd_multiply(i, j).coeffs == k.coeffs
    assert cd_multiply(j, i).coeffs == (-k).coeffs
    assert cd_multiply(i, i).coeffs == (-1.0, 0.0, 0.0, 0.0)


def test_expansion_of_product():
    one_i = AlgebraElement((1.0, 1.0, 0.0, 0.0))
    one_j = AlgebraElement((1.0, 0.0, 1.0, 0.0))
    prod = cd_multiply(one_i, one_j)
    assert prod.coeffs == (1.0, 1.0, 1.0, 1.0)
    assert approx_equal(norm(prod), 2.0)


def test_conjugate_and_norm():
    assert cd_conjugate(AlgebraElement((1, 1, 1, 1))).coeffs == (1, -1, -1, -1)
    assert approx_equal(norm(AlgebraElement((3.0, 4.0))), 5.0)


def test_octonions_are_not_associative():
    e = units(8)
    left = cd_multiply(cd_multiply(e[1], e[2]), e[4])
    right = cd_multiply(e[1], cd_multiply(e[2], e[4]))
    assert left.coeffs != right.coeffs
    assert left.coeffs == tuple(-c for c in right.coeffs)


@pytest.mark.parametrize("dim", [1, 2, 4, 8])
def test_unit_table_is_signed_permutation(dim):
    t = structure_constants(dim)
    assert np.all(np.abs(t).sum(axis=2) == 1)
    for k in range(dim):
        assert np.all(np.abs(t[:, :, k]).sum(axis=1) == 1)


def test_exact_backend_stays_rational():
    x = AlgebraElement((Fraction(1, 2), Fraction(1, 3), Fraction(0), Fraction(2)))
    y = AlgebraElement((Fraction(3), Fraction(-1), Fraction(1, 7), Fraction(0)))
    prod = cd_multiply(x, y)
    assert all(isinstance(c, Fraction) for c in prod.coeffs)
    assert norm_squared(prod) == norm_squared(x) * norm_squared(y)


@pytest.mark.parametrize("dim", [1, 2, 4, 8])
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_norm_is_multiplicative(dim, data):
    x, y = data.draw(element(dim)), data.draw(element(dim))
    lhs = norm_squared(cd_multiply(x, y))
    assert approx_equal(lhs, norm_squared(x) * norm_squared(y), 1e-9)


@pytest.mark.parametrize("dim", [1, 2, 4, 8])
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_composition_with_conjugate(dim, data):
    x = data.draw(element(dim))
    assert approx_equal(real_part(cd_multiply(x, cd_conjugate(x))), norm(x) ** 2, 1e-9)


@settings(max_examples=40, deadline=None)
@given(x=element(8), y=element(8))
def test_octonions_alternative(x, y):
    xx_y = cd_multiply(cd_multiply(x, x), y)
    x_xy = cd_multiply(x, cd_multiply(x, y))
    assert np.allclose(xx_y.coeffs, x_xy.coeffs, atol=1e-7 * (1 + max(map(abs, xx_y.coeffs))))


@settings(max_examples=40, deadline=None)
@given(x=element(8), y=element(8), z=element(8))
def test_moufang_identity(x, y, z):
    # z(x(zy)) = ((zx)z)y
    lhs = cd_multiply(z, cd_multiply(x, cd_multiply(z, y)))
    rhs = cd_multiply(cd_multiply(cd_multiply(z, x), z), y)
    scale = 1 + max(map(abs, lhs.coeffs))
    assert np.allclose(lhs.coeffs, rhs.coeffs, atol=1e-8 * scale)


@pytest.mark.parametrize("dim", [1, 2, 4])
@settings(max_examples=30, deadline=None)
@given(data=st.data())
def test_associative_up_to_quaternions(dim, data):
    x, y, z = (data.draw(element(dim)) for _ in range(3))
    a = mul_arrays(mul_arrays(x.coeffs, y.coeffs), z.coeffs)
    b = mul_arrays(x.coeffs, mul_arrays(y.coeffs, z.coeffs))
    assert np.allclose(a, b, atol=1e-8 * (1 + np.max(np.abs(a))))


def test_realify_identity():
    assert np.allclose(realify(HermitianMatrix.identity("H", 2)), np.eye(4))


def test_realify_is_multiplicative():
    rng = np.random.default_rng(3)
    a, b = random_hermitian(rng, "H", 3), random_hermitian(rng, "H", 3)
    prod = quaternion_matrix_to_complex(a.matmul(b))
    assert np.allclose(prod, realify(a) @ realify(b))


def test_quaternion_eigenvalues_listed_once():
    j = AlgebraElement.unit(4, 2)
    m = HermitianMatrix.from_entries("H", [[cd_multiply(j, cd_conjugate(j))]])
    assert np.allclose(eigvalsh(m), [1.0])
    assert np.allclose(np.linalg.eigvalsh(realify(m)), [1.0, 1.0])


@pytest.mark.parametrize("field", ["R", "C", "H"])
def test_complex_picture_round_trip(field):
    m = random_psd(np.random.default_rng(1), field, 4)
    assert m.isclose(from_complex(field, to_complex(m)))


def test_non_hermitian_is_rejected():
    with pytest.raises(ValueError):
        HermitianMatrix.from_real("R", np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_octonionic_matrices_need_n3():
    with pytest.raises(ValueError):
        HermitianMatrix.identity("O", 2)


@pytest.mark.parametrize("field", ["R", "C", "H", "O"])
def test_float_serialisation_round_trip(field):
    m = random_hermitian(np.random.default_rng(5), field, 3)
    back = matrix_from_dict(matrix_to_dict(m))
    assert back.field == field
    assert np.array_equal(np.asarray(back.data, float), np.asarray(m.data, float))


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=50), min_size=6, max_size=6)
)
def test_rational_serialisation_is_bit_exact(vals):
    a, b, c, d, e, f = vals
    zero = Fraction(0)
    entries = [
        [(a, zero), (b, c), (d, zero)],
        [(b, -c), (e, zero), (f, a)],
        [(d, zero), (f, -a), (c, zero)],
    ]
    m = HermitianMatrix.from_entries("C", entries)
    doc = matrix_to_dict(m)
    assert all(isinstance(x, str) for row in doc["entries"] for e_ in row for x in e_)
    back = matrix_from_dict(doc)
    assert back.exact
    assert np.all(back.data == m.data)
