import itertools

import pytest

from lossft.css import (
    DegenerateCodeError,
    InvalidCodeError,
    LogicalEffect,
    build_css,
    classical_decode_measurement,
    code_to_text,
    decode,
    logical_effect,
    parse_code_text,
    steane_713,
    syndrome,
)
from lossft.pauli import PauliOperator, multiply

CODE = steane_713()


def test_parameters():
    assert (CODE.n, CODE.k, CODE.d) == (7, 1, 3)
    assert sorted(len(g.support) for g in CODE.stabilizers) == [4] * 6
    assert len(CODE.logical_x[0].support) == 3


@pytest.mark.parametrize("j", range(7))
def test_single_x_syndrome_is_binary_position(j):
    sz, sx = syndrome(CODE, PauliOperator.single(7, j, "X"))
    assert sz == tuple(int(b) for b in format(j + 1, "03b"))
    assert not any(sx)


def test_all_weight_one_errors_are_corrected():
    for j, letter in itertools.product(range(7), "XYZ"):
        e = PauliOperator.single(7, j, letter)
        assert logical_effect(CODE, e) is LogicalEffect.IDENTITY
        # decode(syndrome(P)) * P is syndrome-free
        assert not any(map(any, syndrome(CODE, multiply(decode(CODE, *syndrome(CODE, e)), e))))


def test_logical_effects():
    assert logical_effect(CODE, CODE.stabilizers[0]) is LogicalEffect.IDENTITY
    assert logical_effect(CODE, PauliOperator.parse("XXXXXXX")) is LogicalEffect.LOGICAL_X
    assert logical_effect(CODE, PauliOperator.parse("XXIIIII")) is LogicalEffect.LOGICAL_X
    assert logical_effect(CODE, PauliOperator.parse("ZZIIIII")) is LogicalEffect.LOGICAL_Z
    assert logical_effect(CODE, PauliOperator.parse("YYIIIII")) is LogicalEffect.LOGICAL_Y


def test_every_weight_two_x_error_is_logical():
    for a, b in itertools.combinations(range(7), 2):
        e = PauliOperator.from_support(7, (a, b), "X")
        assert logical_effect(CODE, e) is LogicalEffect.LOGICAL_X


def test_classical_decode():
    assert classical_decode_measurement(CODE, [0] * 7, "Z") == (0, (0, 0, 0))
    ones = [1] * 7
    assert classical_decode_measurement(CODE, ones, "Z")[0] == 1
    flipped = ones[:]
    flipped[2] ^= 1
    bit, synd = classical_decode_measurement(CODE, flipped, "X")
    assert bit == 1 and any(synd)
    with pytest.raises(ValueError):
        classical_decode_measurement(CODE, [0] * 6, "Z")


def test_invalid_codes():
    with pytest.raises(InvalidCodeError):
        build_css([[1, 1, 0]], [[0, 1, 0]])
    with pytest.raises(DegenerateCodeError):
        build_css([[1, 1], [0, 1]], [[0, 0]])


def test_code_file_round_trip():
    again = parse_code_text(code_to_text(CODE))
    assert (again.n, again.k, again.d) == (7, 1, 3)
    assert (again.h_x == CODE.h_x).all()
    assert parse_code_text("builtin steane713") is CODE
