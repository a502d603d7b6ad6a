"""Column-major bit-packed stabilizer tableau (Aaronson-Gottesman).

Each qubit ``j`` owns two Python ints ``xs[j]`` and ``zs[j]`` whose bit ``i``
is the X/Z component of tableau row ``i`` on that qubit.  Rows ``0..n-1`` are
destabilizers, rows ``n..2n-1`` stabilizers; ``r`` holds the row signs.  Gates
therefore cost O(1) big-int operations and a measurement O(n).

Row ``i`` denotes ``(-1)**r_i * prod_j i**(x z) X**x Z**z`` (a set x/z pair is Y).
"""

from __future__ import annotations

from .pauli import PauliOperator


def _prefix_xor_exclusive(v: int, width: int) -> int:
    """Bit b of the result is the XOR of bits 0..b-1 of v."""
    s = 1
    while s < width:
        v ^= v << s
        s <<= 1
    return (v << 1) & ((1 << width) - 1)


class Tableau:
    __slots__ = ("n", "xs", "zs", "r")

    def __init__(self, n: int):
        self.n = n
        self.xs = [1 << j for j in range(n)]
        self.zs = [1 << (n + j) for j in range(n)]
        self.r = 0

    def copy(self) -> "Tableau":
        t = Tableau.__new__(Tableau)
        t.n = self.n
        t.xs = self.xs[:]
        t.zs = self.zs[:]
        t.r = self.r
        return t

    @property
    def full(self) -> int:
        return (1 << (2 * self.n)) - 1

    # gates ----------------------------------------------------------------

    def h(self, a: int) -> None:
        xa, za = self.xs[a], self.zs[a]
        self.r ^= xa & za
        self.xs[a], self.zs[a] = za, xa

    def s(self, a: int) -> None:
        xa = self.xs[a]
        self.r ^= xa & self.zs[a]
        self.zs[a] ^= xa

    def cnot(self, c: int, t: int) -> None:
        xs, zs = self.xs, self.zs
        xc, zc, xt, zt = xs[c], zs[c], xs[t], zs[t]
        self.r ^= xc & zt & ~(xt ^ zc)
        xs[t] = xt ^ xc
        zs[c] = zc ^ zt

    def cz(self, a: int, b: int) -> None:
        self.h(b)
        self.cnot(a, b)
        self.h(b)

    def pauli(self, a: int, letter: str) -> None:
        if letter == "X":
            self.r ^= self.zs[a]
        elif letter == "Z":
            self.r ^= self.xs[a]
        elif letter == "Y":
            self.r ^= self.xs[a] ^ self.zs[a]

    def apply_pauli(self, p: PauliOperator, qubits=None) -> None:
        """Conjugate by ``p``; ``qubits`` maps p's positions onto tableau qubits."""
        qubits = range(p.n) if qubits is None else qubits
        flip = 0
        for j, q in enumerate(qubits):
            if (p.x >> j) & 1:
                flip ^= self.zs[q]
            if (p.z >> j) & 1:
                flip ^= self.xs[q]
        self.r ^= flip

    # measurement ------------------------------------------------------------

    def _anticommuting_rows(self, px: dict, pz: dict) -> int:
        m = 0
        for q in pz:
            m ^= self.xs[q]
        for q in px:
            m ^= self.zs[q]
        return m

    def measure_pauli(self, px, pz):
        """Measure the Hermitian Pauli with X part on ``px`` and Z part on ``pz``
        (iterables of qubit indices; a qubit in both is Y).

        Returns ``(None, p)`` when the outcome is random: the tableau has been
        updated with outcome 0 and the caller flips ``r`` bit ``p`` for
        outcome 1.  Returns ``(bit, None)`` for a deterministic outcome.
        """
        px, pz = set(px), set(pz)
        n = self.n
        anti = self._anticommuting_rows(px, pz)
        stab = anti >> n
        if stab:
            p = n + ((stab & -stab).bit_length() - 1)
            self._rowsum_all(anti & ~(1 << p), p)
            d = p - n
            bit_p, bit_d = 1 << p, 1 << d
            xs, zs = self.xs, self.zs
            for q in range(n):
                xq, zq = xs[q], zs[q]
                xq = (xq | bit_d) if xq & bit_p else (xq & ~bit_d)
                zq = (zq | bit_d) if zq & bit_p else (zq & ~bit_d)
                xq &= ~bit_p
                zq &= ~bit_p
                if q in px:
                    xq |= bit_p
                if q in pz:
                    zq |= bit_p
                xs[q], zs[q] = xq, zq
            r = self.r
            r = (r | bit_d) if r & bit_p else (r & ~bit_d)
            self.r = r & ~bit_p
            return None, p
        return self._product_sign(anti & ((1 << n) - 1), px, pz), None

    def measure_z(self, a: int):
        return self.measure_pauli((), (a,))

    def measure_x(self, a: int):
        return self.measure_pauli((a,), ())

    def _rowsum_all(self, rows: int, p: int) -> None:
        """Replace every row h in the mask ``rows`` by (row p) * (row h)."""
        if not rows:
            return
        c0 = c1 = 0
        xs, zs = self.xs, self.zs
        for q in range(self.n):
            xq, zq = xs[q], zs[q]
            a = (xq >> p) & 1
            b = (zq >> p) & 1
            if not (a or b):
                continue
            x = xq & rows
            z = zq & rows
            if a and b:
                plus, minus = z & ~x, x & ~z
            elif a:
                plus, minus = x & z, z & ~x
            else:
                plus, minus = x & ~z, x & z
            # bit-sliced mod-4 counter: +1 on plus, +3 on minus
            for m in (plus, minus):
                if m:
                    carry = c0 & m
                    c0 ^= m
                    c1 ^= carry
            c1 ^= minus
            if a:
                xs[q] = xq ^ rows
            if b:
                zs[q] = zq ^ rows
        rp = rows if (self.r >> p) & 1 else 0
        self.r ^= (rp ^ c1) & rows

    def _product_sign(self, destab_mask: int, px, pz) -> int:
        """Outcome bit of a deterministic measurement: the sign of the product
        of stabilizer rows paired with the destabilizers in ``destab_mask``."""
        n = self.n
        s = destab_mask << n
        width = 2 * n
        total = 2 * (self.r & s).bit_count()
        pairs = 0
        for q in range(n):
            x = self.xs[q] & s
            z = self.zs[q] & s
            if not (x or z):
                continue
            total += (x & z).bit_count()
            if x and z:
                pairs += (x & _prefix_xor_exclusive(z, width)).bit_count()
        total += 2 * pairs
        w = len(set(px) & set(pz))
        k = (total - w) % 4
        if k % 2:
            raise AssertionError("measured operator does not commute with the state")
        return k // 2

    # inspection -------------------------------------------------------------

    def row(self, i: int) -> PauliOperator:
        x = z = 0
        for q in range(self.n):
            x |= ((self.xs[q] >> i) & 1) << q
            z |= ((self.zs[q] >> i) & 1) << q
        return PauliOperator(self.n, x, z, 2 * ((self.r >> i) & 1))

    def stabilizers(self) -> list[PauliOperator]:
        return [self.row(self.n + i) for i in range(self.n)]

    def destabilizers(self) -> list[PauliOperator]:
        return [self.row(i) for i in range(self.n)]

    def state_key(self) -> tuple:
        """Hashable key equal for tableaux with identical stabilizer rows and signs."""
        n = self.n
        return (tuple(x >> n for x in self.xs), tuple(z >> n for z in self.zs), self.r >> n)

    def expectation(self, p: PauliOperator) -> int | None:
        """+1/-1 if ``p`` (or -p) is in the stabilizer group, else None."""
        px = [j for j in range(p.n) if (p.x >> j) & 1]
        pz = [j for j in range(p.n) if (p.z >> j) & 1]
        anti = self._anticommuting_rows(set(px), set(pz))
        if anti >> self.n:
            return None
        bit = self._product_sign(anti & ((1 << self.n) - 1), px, pz)
        return (-1 if bit else 1) * p.sign
