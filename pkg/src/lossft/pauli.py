"""Bit-packed n-qubit Pauli operators and GF(2) linear algebra helpers.

A Pauli is stored as two Python ints (``x`` and ``z``, bit ``j`` = qubit ``j``)
plus a phase exponent ``k`` so that the operator equals

    i**k * prod_j (i**(x_j z_j) X**x_j Z**z_j)

i.e. a set (x, z) bit pair is the Hermitian ``Y``.  Hermitian operators have
even ``k`` and their sign is ``(-1)**(k // 2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

_LETTERS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS = {v: k for k, v in _LETTERS.items()}


class DimensionError(ValueError):
    """Operands act on different numbers of qubits."""


def _popcount(v: int) -> int:
    return v.bit_count()


@dataclass(frozen=True)
class PauliOperator:
    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask:
            raise DimensionError(f"bits outside {self.n} qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    # construction -------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliOperator":
        bx, bz = _BITS[letter.upper()]
        return cls(n, bx << qubit, bz << qubit)

    @classmethod
    def from_support(cls, n: int, support: Iterable[int], letter: str) -> "PauliOperator":
        bx, bz = _BITS[letter.upper()]
        mask = 0
        for q in support:
            mask |= 1 << int(q)
        return cls(n, mask if bx else 0, mask if bz else 0)

    @classmethod
    def from_bits(cls, x_bits: Sequence[int], z_bits: Sequence[int], sign: int = 1) -> "PauliOperator":
        if len(x_bits) != len(z_bits):
            raise DimensionError("x_bits and z_bits differ in length")
        x = sum(1 << j for j, b in enumerate(x_bits) if b)
        z = sum(1 << j for j, b in enumerate(z_bits) if b)
        return cls(len(x_bits), x, z, 0 if sign == 1 else 2)

    @classmethod
    def parse(cls, text: str) -> "PauliOperator":
        """Parse ``"+XZI"``, ``"-IYZ"``, ``"iXX"``, ``"-iZ"`` or a bare ``"XYZ"``."""
        s = text.strip()
        phase = 0
        if s[:1] in "+-":
            phase = 2 if s[0] == "-" else 0
            s = s[1:]
        if s[:1] == "i":
            phase += 1
            s = s[1:]
        x = z = 0
        for j, ch in enumerate(s):
            if ch not in _BITS:
                raise ValueError(f"bad Pauli letter {ch!r} in {text!r}")
            bx, bz = _BITS[ch]
            x |= bx << j
            z |= bz << j
        return cls(len(s), x, z, phase)

    # views ----------------------------------------------------------------

    @property
    def x_bits(self) -> tuple[int, ...]:
        return tuple((self.x >> j) & 1 for j in range(self.n))

    @property
    def z_bits(self) -> tuple[int, ...]:
        return tuple((self.z >> j) & 1 for j in range(self.n))

    @property
    def hermitian(self) -> bool:
        return self.phase % 2 == 0

    @property
    def sign(self) -> int:
        """+1 or -1; for non-Hermitian products this is the sign of the i factor."""
        return -1 if self.phase >= 2 else 1

    @property
    def support(self) -> tuple[int, ...]:
        m = self.x | self.z
        return tuple(j for j in range(self.n) if (m >> j) & 1)

    def letter(self, qubit: int) -> str:
        return _LETTERS[((self.x >> qubit) & 1, (self.z >> qubit) & 1)]

    def __str__(self) -> str:
        head = "-" if self.phase >= 2 else "+"
        if self.phase % 2:
            head += "i"
        return head + "".join(self.letter(j) for j in range(self.n))

    def __repr__(self) -> str:
        return f"PauliOperator.parse({str(self)!r})"

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return multiply(self, other)

    def __neg__(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, self.phase + 2)

    def unsigned(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, 0)

    def to_matrix(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix; qubit 0 is the most significant tensor factor."""
        single = {
            "I": np.eye(2, dtype=complex),
            "X": np.array([[0, 1], [1, 0]], dtype=complex),
            "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
            "Z": np.array([[1, 0], [0, -1]], dtype=complex),
        }
        m = np.eye(1, dtype=complex)
        for j in range(self.n):
            m = np.kron(m, single[self.letter(j)])
        return (1j ** self.phase) * m


def _check(a: PauliOperator, b: PauliOperator) -> None:
    if a.n != b.n:
        raise DimensionError(f"{a.n}-qubit and {b.n}-qubit operands")


def product_phase(ax: int, az: int, bx: int, bz: int) -> int:
    """Exponent of i picked up by (ax, az)*(bx, bz) in the Hermitian-letter convention."""
    cx, cz = ax ^ bx, az ^ bz
    return (_popcount(ax & az) + _popcount(bx & bz) + 2 * _popcount(az & bx) - _popcount(cx & cz)) % 4


def multiply(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    _check(a, b)
    k = a.phase + b.phase + product_phase(a.x, a.z, b.x, b.z)
    return PauliOperator(a.n, a.x ^ b.x, a.z ^ b.z, k)


def commutes(a: PauliOperator, b: PauliOperator) -> bool:
    _check(a, b)
    return (_popcount(a.x & b.z) + _popcount(a.z & b.x)) % 2 == 0


def weight(p: PauliOperator) -> int:
    return _popcount(p.x | p.z)


# ---------------------------------------------------------------------------
# GF(2) matrices.  A BinaryMatrix is a 2-D uint8 numpy array with 0/1 entries.

BinaryMatrix = np.ndarray


def as_binary_matrix(rows, n_cols: int | None = None) -> BinaryMatrix:
    """Build a binary matrix from 0/1 strings or nested sequences."""
    rows = list(rows)
    if not rows:
        return np.zeros((0, n_cols or 0), dtype=np.uint8)
    parsed = [[int(c) for c in r] if isinstance(r, str) else list(r) for r in rows]
    m = np.array(parsed, dtype=np.uint8)
    if m.ndim != 2:
        raise ValueError("rows must have equal length")
    if np.any(m > 1):
        raise ValueError("entries must be 0 or 1")
    return m


def gf2_rref(m: BinaryMatrix) -> tuple[BinaryMatrix, list[int]]:
    """Reduced row echelon form over GF(2) and the pivot columns."""
    a = np.array(m, dtype=np.uint8) % 2
    pivots = []
    row = 0
    rows, cols = a.shape
    for col in range(cols):
        if row >= rows:
            break
        nz = np.nonzero(a[row:, col])[0]
        if nz.size == 0:
            continue
        piv = row + nz[0]
        if piv != row:
            a[[row, piv]] = a[[piv, row]]
        others = np.nonzero(a[:, col])[0]
        for r in others:
            if r != row:
                a[r] ^= a[row]
        pivots.append(col)
        row += 1
    return a[:row], pivots


def gf2_rank(m: BinaryMatrix) -> int:
    if m.size == 0:
        return 0
    return len(gf2_rref(m)[1])


def gf2_nullspace(m: BinaryMatrix) -> BinaryMatrix:
    """Basis (as rows) of {v : m v = 0 mod 2}."""
    cols = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(cols, dtype=np.uint8)
    r, pivots = gf2_rref(m)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.uint8)
        v[f] = 1
        for i, p in enumerate(pivots):
            v[p] = r[i, f]
        basis.append(v)
    return np.array(basis, dtype=np.uint8).reshape(len(basis), cols)


def in_rowspace(m: BinaryMatrix, v) -> bool:
    v = np.asarray(v, dtype=np.uint8).reshape(1, -1)
    if m.shape[0] == 0:
        return not v.any()
    return gf2_rank(np.vstack([m, v])) == gf2_rank(m)


def row_to_int(row) -> int:
    return sum(1 << j for j, b in enumerate(row) if b)


def int_to_row(v: int, n: int) -> np.ndarray:
    return np.array([(v >> j) & 1 for j in range(n)], dtype=np.uint8)
