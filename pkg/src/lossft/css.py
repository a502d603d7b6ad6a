"""CSS codes: construction, syndromes, lookup decoding and logical classification."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .pauli import (
    BinaryMatrix,
    PauliOperator,
    as_binary_matrix,
    gf2_nullspace,
    gf2_rank,
    in_rowspace,
    int_to_row,
    multiply,
    row_to_int,
)

HAMMING_7_4_CHECKS = ("0001111", "0110011", "1010101")


class InvalidCodeError(ValueError):
    pass


class DegenerateCodeError(ValueError):
    pass


class DecodeMissError(LookupError):
    """Syndrome has no entry in the lookup table."""


class LogicalEffect(str, Enum):
    IDENTITY = "identity"
    LOGICAL_X = "logical_X"
    LOGICAL_Y = "logical_Y"
    LOGICAL_Z = "logical_Z"
    DETECTABLE = "detectable"
    UNCORRECTABLE = "uncorrectable_after_decode"


Syndrome = tuple  # tuple of 0/1 ints


@dataclass(frozen=True, eq=False)
class CssCode:
    n: int
    k: int
    d: int
    h_x: BinaryMatrix
    h_z: BinaryMatrix
    logical_x: tuple[PauliOperator, ...]
    logical_z: tuple[PauliOperator, ...]
    decode_table_x: dict = field(repr=False)
    decode_table_z: dict = field(repr=False)
    name: str = ""

    @property
    def stabilizers(self) -> list[PauliOperator]:
        """X-type generators first, then Z-type."""
        xs = [PauliOperator.from_support(self.n, np.nonzero(r)[0], "X") for r in self.h_x]
        zs = [PauliOperator.from_support(self.n, np.nonzero(r)[0], "Z") for r in self.h_z]
        return xs + zs


def _syndrome_of(h: BinaryMatrix, v: int) -> tuple:
    return tuple(int(bin(row_to_int(r) & v).count("1") % 2) for r in h)


def _min_weight_table(h: BinaryMatrix, n: int, max_weight: int) -> dict:
    """Syndrome -> support bitmask of a minimal-weight error; combinations are
    visited in lexicographic order so ties resolve to the lowest qubit indices."""
    table = {_syndrome_of(h, 0): 0}
    for w in range(1, max_weight + 1):
        for combo in itertools.combinations(range(n), w):
            v = sum(1 << q for q in combo)
            table.setdefault(_syndrome_of(h, v), v)
    return table


def _rowspace_elements(m: BinaryMatrix, n: int) -> list[int]:
    rows = [row_to_int(r) for r in m]
    out = []
    for bits in itertools.product((0, 1), repeat=len(rows)):
        v = 0
        for b, r in zip(bits, rows):
            if b:
                v ^= r
        out.append(v)
    return out


def _reduce_in_coset(v: int, stab_elems: list[int] | None) -> int:
    if stab_elems is None:
        return v
    return min((v ^ s for s in stab_elems), key=lambda u: (u.bit_count(), u))


def _logical_pairs(h_x, h_z, n):
    """Symplectically paired logical X/Z supports via Gram-Schmidt."""
    # X logicals live in ker(h_z) modulo rowspace(h_x); Z logicals dually.
    def complement(kernel_of, modulo):
        basis = gf2_nullspace(kernel_of) if kernel_of.shape[0] else np.eye(n, dtype=np.uint8)
        reps = []
        acc = modulo.copy() if modulo.shape[0] else np.zeros((0, n), dtype=np.uint8)
        for v in basis:
            if not in_rowspace(acc, v):
                reps.append(v)
                acc = np.vstack([acc, v])
        return reps

    lx = complement(h_z, h_x)
    lz = complement(h_x, h_z)
    lx = [row_to_int(v) for v in lx]
    lz = [row_to_int(v) for v in lz]
    px, pz = [], []
    while lx:
        a = lx.pop(0)
        j = next(i for i, b in enumerate(lz) if (a & b).bit_count() % 2)
        b = lz.pop(j)
        lx = [c ^ a if (c & b).bit_count() % 2 else c for c in lx]
        lz = [c ^ b if (c & a).bit_count() % 2 else c for c in lz]
        px.append(a)
        pz.append(b)
    return px, pz


def _distance(h_x, h_z, n, k, cap) -> int:
    """Smallest weight of a logical operator, searched up to ``cap``."""
    if k == 0:
        return 0
    for w in range(1, cap + 1):
        for combo in itertools.combinations(range(n), w):
            v = sum(1 << q for q in combo)
            row = int_to_row(v, n)
            if not any(_syndrome_of(h_z, v)) and not in_rowspace(h_x, row):
                return w
            if not any(_syndrome_of(h_x, v)) and not in_rowspace(h_z, row):
                return w
    return cap + 1


def build_css(
    h_x, h_z, *, n: int | None = None, max_decode_weight: int | None = None, distance_cap: int = 7, name: str = ""
) -> CssCode:
    """Build a CSS code from X- and Z-check matrices.

    Args:
        h_x: rows are supports of X-type stabilizers.
        h_z: rows are supports of Z-type stabilizers.
        max_decode_weight: weight cap for the brute-force lookup tables;
            defaults to (d - 1) // 2.
        n: qubit count; only needed when both matrices are empty.
        distance_cap: largest weight tried when computing the distance.
    """
    h_x = as_binary_matrix(h_x) if not isinstance(h_x, np.ndarray) else h_x.astype(np.uint8)
    h_z = as_binary_matrix(h_z) if not isinstance(h_z, np.ndarray) else h_z.astype(np.uint8)
    n = max(h_x.shape[1], h_z.shape[1], n or 0)
    if h_x.shape[0] == 0:
        h_x = np.zeros((0, n), dtype=np.uint8)
    if h_z.shape[0] == 0:
        h_z = np.zeros((0, n), dtype=np.uint8)
    if h_x.shape[1] != h_z.shape[1]:
        raise InvalidCodeError("h_x and h_z have different column counts")
    if h_x.shape[0] and h_z.shape[0] and np.any((h_x.astype(int) @ h_z.T.astype(int)) % 2):
        raise InvalidCodeError("X and Z checks are not orthogonal")
    k = n - gf2_rank(h_x) - gf2_rank(h_z)
    if k <= 0:
        raise DegenerateCodeError(f"code encodes k={k} qubits")
    d = _distance(h_x, h_z, n, k, min(distance_cap, n))
    t = (d - 1) // 2 if max_decode_weight is None else max_decode_weight
    lx, lz = _logical_pairs(h_x, h_z, n)
    # minimal-weight representatives when the stabilizer group is small
    sx = _rowspace_elements(h_x, n) if h_x.shape[0] <= 12 else None
    sz = _rowspace_elements(h_z, n) if h_z.shape[0] <= 12 else None
    if k == 1:
        lx = [_reduce_in_coset(lx[0], sx)]
        lz = [_reduce_in_coset(lz[0], sz)]
    return CssCode(
        n=n,
        k=k,
        d=d,
        h_x=h_x,
        h_z=h_z,
        logical_x=tuple(PauliOperator(n, v, 0) for v in lx),
        logical_z=tuple(PauliOperator(n, 0, v) for v in lz),
        decode_table_x=_min_weight_table(h_z, n, t),
        decode_table_z=_min_weight_table(h_x, n, t),
        name=name,
    )


_STEANE: CssCode | None = None


def steane_713() -> CssCode:
    """The [[7,1,3]] Steane code built from the Hamming [7,4,3] checks.

    Column j of the check matrix is the binary expansion of j + 1, so a single
    flip on qubit j has syndrome ``bin(j + 1)`` read top row first.
    """
    global _STEANE
    if _STEANE is None:
        _STEANE = build_css(HAMMING_7_4_CHECKS, HAMMING_7_4_CHECKS, name="steane713")
    return _STEANE


CODES = {"steane713": steane_713}


def get_code(name: str) -> CssCode:
    try:
        return CODES[name]()
    except KeyError:
        raise KeyError(f"unknown code {name!r}; known: {sorted(CODES)}") from None


def syndrome(code: CssCode, e: PauliOperator) -> tuple[Syndrome, Syndrome]:
    """(z-type syndrome = h_z . x_bits, x-type syndrome = h_x . z_bits)."""
    if e.n != code.n:
        raise ValueError(f"{e.n}-qubit error on an {code.n}-qubit code")
    return _syndrome_of(code.h_z, e.x), _syndrome_of(code.h_x, e.z)


def decode(code: CssCode, synd_z, synd_x) -> PauliOperator:
    synd_z, synd_x = tuple(int(b) for b in synd_z), tuple(int(b) for b in synd_x)
    if len(synd_z) != code.h_z.shape[0] or len(synd_x) != code.h_x.shape[0]:
        raise ValueError("syndrome length does not match generator count")
    try:
        x = code.decode_table_x[synd_z]
        z = code.decode_table_z[synd_x]
    except KeyError as exc:
        raise DecodeMissError(f"no correction for syndrome {synd_z}/{synd_x}") from exc
    return PauliOperator(code.n, x, z)


def _in_span(m: BinaryMatrix, v: int, n: int) -> bool:
    return in_rowspace(m, int_to_row(v, n)) if m.shape[0] else v == 0


def logical_effect(code: CssCode, residual: PauliOperator) -> LogicalEffect:
    """Classify ``residual`` after one ideal lookup-decode round (k = 1 codes)."""
    sz, sx = syndrome(code, residual)
    try:
        corr = decode(code, sz, sx)
    except DecodeMissError:
        return LogicalEffect.DETECTABLE
    net = multiply(corr, residual)
    if any(syndrome(code, net)[0]) or any(syndrome(code, net)[1]):
        return LogicalEffect.UNCORRECTABLE
    lx = code.logical_x[0].x
    lz = code.logical_z[0].z
    x_trivial = _in_span(code.h_x, net.x, code.n)
    z_trivial = _in_span(code.h_z, net.z, code.n)
    flip_x = not x_trivial and _in_span(code.h_x, net.x ^ lx, code.n)
    flip_z = not z_trivial and _in_span(code.h_z, net.z ^ lz, code.n)
    if (not x_trivial and not flip_x) or (not z_trivial and not flip_z):
        return LogicalEffect.UNCORRECTABLE
    if flip_x and flip_z:
        return LogicalEffect.LOGICAL_Y
    if flip_x:
        return LogicalEffect.LOGICAL_X
    if flip_z:
        return LogicalEffect.LOGICAL_Z
    return LogicalEffect.IDENTITY


def classical_decode_measurement(code: CssCode, bits, basis: str) -> tuple[int, Syndrome]:
    """Decode a transversal single-qubit measurement of one code block.

    Z-basis outcomes are checked against the Z-type classical checks and read
    out on the logical Z support; X-basis outcomes use the X-type checks and
    the logical X support.

    Returns:
        (logical_bit, syndrome) where the logical bit is computed after
        flipping the positions picked by the lookup decoder.
    """
    bits = [int(b) for b in bits]
    if len(bits) != code.n:
        raise ValueError(f"expected {code.n} bits, got {len(bits)}")
    v = row_to_int(bits)
    if basis.upper() == "Z":
        checks, table, support = code.h_z, code.decode_table_x, code.logical_z[0].z
    elif basis.upper() == "X":
        checks, table, support = code.h_x, code.decode_table_z, code.logical_x[0].x
    else:
        raise ValueError(f"basis must be 'X' or 'Z', not {basis!r}")
    synd = _syndrome_of(checks, v)
    try:
        v ^= table[synd]
    except KeyError as exc:
        raise DecodeMissError(f"no correction for syndrome {synd}") from exc
    return (v & support).bit_count() % 2, synd


# --- code definition file -------------------------------------------------


def parse_code_text(text: str, name: str = "") -> CssCode:
    """Parse a code file::

        # comment
        hx:
        0001111
        ...
        hz:
        0001111
        ...

    A file containing only ``builtin steane713`` returns the named code.
    """
    section = None
    rows = {"hx": [], "hz": []}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("builtin"):
            return get_code(line.split()[1])
        if line.rstrip(":").lower() in rows:
            section = line.rstrip(":").lower()
            continue
        if section is None or set(line) - {"0", "1"}:
            raise ValueError(f"unexpected line in code file: {raw!r}")
        rows[section].append(line)
    return build_css(rows["hx"], rows["hz"], name=name)


def load_code(path) -> CssCode:
    p = Path(path)
    return parse_code_text(p.read_text(), name=p.stem)


def code_to_text(code: CssCode) -> str:
    lines = ["hx:"] + ["".join(map(str, r)) for r in code.h_x]
    lines += ["hz:"] + ["".join(map(str, r)) for r in code.h_z]
    return "\n".join(lines) + "\n"
