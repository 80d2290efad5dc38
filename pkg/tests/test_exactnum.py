import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from algstat.exactnum import (
    IntMatrix,
    lattice_kernel,
    rat_from_str,
    rat_to_str,
    rational_nullspace,
    rref,
    smith_normal_form,
)


def check_snf(A):
    res = smith_normal_form(A)
    assert res.U.mul(A).mul(res.V).entries == res.S.entries
    assert res.U.det() in (1, -1)
    assert res.V.det() in (1, -1)
    diag = res.diagonal()
    for i in range(res.rank):
        assert diag[i] > 0
        if i + 1 < res.rank:
            assert diag[i + 1] % diag[i] == 0
    for i in range(res.rank, len(diag)):
        assert diag[i] == 0
    # off-diagonal entries vanish
    for i in range(res.S.rows):
        for j in range(res.S.cols):
            if i != j:
                assert res.S[i, j] == 0
    # A reconstructs from the exact integer inverses of U and V
    recon = res.U.inverse_unimodular().mul(res.S).mul(res.V.inverse_unimodular())
    assert recon.entries == A.entries
    return res


def test_snf_identity():
    A = IntMatrix.identity(2)
    res = check_snf(A)
    assert res.S.entries == A.entries
    assert res.rank == 2


def test_snf_2x2_example():
    A = IntMatrix.from_rows([[2, 4], [6, 8]])
    res = check_snf(A)
    assert res.diagonal() == (2, 4)
    assert res.rank == 2


def test_snf_zero():
    A = IntMatrix.zero(3, 3)
    res = check_snf(A)
    assert res.rank == 0
    assert all(x == 0 for row in res.S.entries for x in row)


def test_snf_rectangular():
    A = IntMatrix.from_rows([[2, 4, 6], [4, 8, 12]])
    res = check_snf(A)
    assert res.rank == 1
    assert res.diagonal()[0] == 2


@settings(max_examples=150, deadline=None)
@given(
    st.integers(1, 4),
    st.integers(1, 4),
    st.data(),
)
def test_snf_random(nr, nc, data):
    rows = [
        [data.draw(st.integers(-9, 9)) for _ in range(nc)]
        for _ in range(nr)
    ]
    check_snf(IntMatrix.from_rows(rows))


def test_lattice_kernel_ones_row():
    A = IntMatrix.from_rows([[1, 1, 1]])
    basis = lattice_kernel(A)
    assert len(basis) == 2
    for v in basis:
        assert A.mul_vec(v) == (0,)
    # basis spans a rank-2 lattice
    B = IntMatrix.from_rows(basis)
    assert smith_normal_form(B).rank == 2


def test_lattice_kernel_injective():
    assert lattice_kernel(IntMatrix.identity(2)) == []


def test_lattice_kernel_forced():
    basis = lattice_kernel(IntMatrix.from_rows([[1, -1]]))
    assert len(basis) == 1
    assert basis[0] in ((1, 1), (-1, -1))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3), st.integers(1, 5), st.data())
def test_lattice_kernel_random(nr, nc, data):
    rows = [[data.draw(st.integers(-6, 6)) for _ in range(nc)] for _ in range(nr)]
    A = IntMatrix.from_rows(rows)
    basis = lattice_kernel(A)
    for v in basis:
        assert all(x == 0 for x in A.mul_vec(v))
    assert len(basis) == nc - smith_normal_form(A).rank


def test_nullspace_identity():
    M = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert rational_nullspace(M) == []


def test_nullspace_forced():
    basis = rational_nullspace([[1, 1]])
    assert basis == [(mpq(-1), mpq(1))]


def test_nullspace_rank4_frozen():
    # seeded 4x6 rank-4 matrix; the expected kernel dimension is 2
    rng = random.Random(20240811)
    while True:
        M = [[rng.randint(-5, 5) for _ in range(6)] for _ in range(4)]
        if len(rref(M)[1]) == 4:
            break
    basis = rational_nullspace(M)
    assert len(basis) == 2
    for v in basis:
        for row in M:
            assert sum(mpq(a) * b for a, b in zip(row, v)) == 0


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4), st.integers(1, 5), st.data())
def test_nullspace_random(nr, nc, data):
    M = [[data.draw(st.integers(-6, 6)) for _ in range(nc)] for _ in range(nr)]
    basis = rational_nullspace(M)
    for v in basis:
        for row in M:
            assert sum(mpq(a) * b for a, b in zip(row, v)) == 0
    # linear independence: stacking the basis gives full row rank
    if basis:
        assert len(rref(basis)[1]) == len(basis)
    assert len(basis) == nc - len(rref(M)[1])
    # determinism
    assert rational_nullspace(M) == basis


def test_rat_str_roundtrip():
    for q in (mpq(1, 4), mpq(-3, 7), mpq(5), mpq(0)):
        assert rat_from_str(rat_to_str(q)) == q
    assert rat_to_str(mpq(1, 4)) == "1//4"
    assert rat_to_str(mpq(-2)) == "-2"


def test_unimodular_inverse_rejects():
    with pytest.raises(ValueError):
        IntMatrix.from_rows([[2, 0], [0, 1]]).inverse_unimodular()
