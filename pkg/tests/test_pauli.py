import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lossft.pauli import (
    DimensionError,
    PauliOperator,
    commutes,
    gf2_nullspace,
    gf2_rank,
    gf2_rref,
    in_rowspace,
    multiply,
    weight,
)


def paulis(n):
    return st.builds(
        lambda x, z, k: PauliOperator(n, x, z, k),
        st.integers(0, (1 << n) - 1),
        st.integers(0, (1 << n) - 1),
        st.integers(0, 3),
    )


def test_parse_and_str_round_trip():
    p = PauliOperator.parse("-XYZI")
    assert p.n == 4 and p.sign == -1
    assert p.letter(1) == "Y" and p.letter(3) == "I"
    assert PauliOperator.parse(str(p)) == p


def test_bad_letter():
    with pytest.raises(ValueError):
        PauliOperator.parse("XQ")


def test_xz_is_minus_i_y():
    # X Z = -i Y
    p = PauliOperator.parse("X") * PauliOperator.parse("Z")
    assert np.allclose(p.to_matrix(), -1j * PauliOperator.parse("Y").to_matrix())


def test_weight_and_support():
    p = PauliOperator.parse("IXIYZ")
    assert weight(p) == 3
    assert p.support == (1, 3, 4)


def test_from_support_beyond_64_qubits():
    p = PauliOperator.from_support(97, [3, 90], "Z")
    assert p.support == (3, 90)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        multiply(PauliOperator.parse("X"), PauliOperator.parse("XX"))


@settings(max_examples=150, deadline=None)
@given(paulis(3), paulis(3))
def test_multiply_matches_matrices(a, b):
    assert np.allclose((a * b).to_matrix(), a.to_matrix() @ b.to_matrix())


@settings(max_examples=150, deadline=None)
@given(paulis(3), paulis(3))
def test_commutation_matches_matrices(a, b):
    ma, mb = a.to_matrix(), b.to_matrix()
    assert commutes(a, b) == np.allclose(ma @ mb, mb @ ma)


@settings(max_examples=60, deadline=None)
@given(paulis(4))
def test_hermitian_squares_to_identity(p):
    if p.hermitian:
        assert (p * p).unsigned() == PauliOperator.identity(4)
        assert (p * p).sign == 1


def test_gf2_helpers():
    m = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]], dtype=np.uint8)
    assert gf2_rank(m) == 2
    rows, pivots = gf2_rref(m)
    assert len(pivots) == 2
    ns = gf2_nullspace(m)
    assert ns.shape[0] == 1
    assert not np.any((m.astype(int) @ ns[0].astype(int)) % 2)
    assert in_rowspace(m, [1, 0, 1]) and not in_rowspace(m, [1, 0, 0])
