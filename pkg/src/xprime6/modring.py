"""Residues and 2x2 matrices over Z/nZ.

Two layers live here.  :class:`Mat2` is the user-facing value type: a
matrix that carries its modulus, with entries kept in ``[0, n)``.  The
group engine never touches ``Mat2`` objects in bulk; it works on integer
*codes* instead, ``code = ((a*n + b)*n + c)*n + d``, which sort in the
same row-major lexicographic order as the matrices themselves.
:class:`GL2Codec` does vectorised arithmetic on numpy arrays of codes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from .errors import InputError

# Largest modulus for which n**4 codes fit comfortably in int64.
MAX_CODEC_MODULUS = 1 << 15


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorisation (moduli here are small)."""
    if n < 1:
        raise InputError(f"cannot factor {n}")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def gl2_order(n: int) -> int:
    """|GL_2(Z/nZ)| = n^4 * prod_{p | n} (1 - 1/p)(1 - 1/p^2)."""
    order = n**4
    for p in factorize(n):
        order = order // p**3 * (p - 1) * (p * p - 1)
    return order


def unit_group(n: int) -> list[int]:
    return [u for u in range(n) if math.gcd(u, n) == 1] if n > 1 else [0]


@dataclass(frozen=True, order=True)
class Mat2:
    """A 2x2 matrix [[a, b], [c, d]] over Z/nZ."""

    modulus: int
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        n = self.modulus
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise InputError(f"modulus must be a positive integer, got {n!r}")
        object.__setattr__(self, "modulus", int(n))
        for name in "abcd":
            object.__setattr__(self, name, int(getattr(self, name)) % n)

    @classmethod
    def from_rows(cls, rows, n: int) -> Mat2:
        (a, b), (c, d) = rows
        return cls(n, a, b, c, d)

    @classmethod
    def identity(cls, n: int) -> Mat2:
        return cls(n, 1, 0, 0, 1)

    @classmethod
    def scalar(cls, s: int, n: int) -> Mat2:
        return cls(n, s, 0, 0, s)

    @classmethod
    def parse(cls, text: str, n: int) -> Mat2:
        """Parse the row-major literal ``"a,b;c,d"``; entries are reduced mod n."""
        rows = text.strip().split(";")
        if len(rows) != 2:
            raise InputError(f"matrix {text!r}: expected two rows separated by ';'")
        entries = []
        for r, row in enumerate(rows):
            cells = row.split(",")
            if len(cells) != 2:
                raise InputError(f"matrix {text!r}: row {r + 1} needs two entries")
            for col, cell in enumerate(cells):
                try:
                    entries.append(int(cell.strip()))
                except ValueError:
                    raise InputError(
                        f"matrix {text!r}: entry ({r + 1},{col + 1}) = {cell.strip()!r} is not an integer"
                    ) from None
        return cls(n, *entries)

    def __str__(self) -> str:
        return f"{self.a},{self.b};{self.c},{self.d}"

    def rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return (self.a, self.b), (self.c, self.d)

    @property
    def det(self) -> int:
        return (self.a * self.d - self.b * self.c) % self.modulus

    @property
    def trace(self) -> int:
        return (self.a + self.d) % self.modulus

    def is_invertible(self) -> bool:
        return math.gcd(self.det, self.modulus) == 1

    def inverse(self) -> Mat2 | None:
        n = self.modulus
        if not self.is_invertible():
            return None
        if n == 1:
            return self
        e = pow(self.det, -1, n)
        return Mat2(n, self.d * e, -self.b * e, -self.c * e, self.a * e)

    def __mul__(self, other: Mat2) -> Mat2:
        return mat_product(self, other)

    __matmul__ = __mul__

    def __pow__(self, k: int) -> Mat2:
        if k < 0:
            inv = self.inverse()
            if inv is None:
                raise InputError(f"{self} is not invertible mod {self.modulus}")
            return inv ** (-k)
        result, base = Mat2.identity(self.modulus), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    @property
    def code(self) -> int:
        n = self.modulus
        return ((self.a * n + self.b) * n + self.c) * n + self.d

    @classmethod
    def from_code(cls, code: int, n: int) -> Mat2:
        code = int(code)
        d = code % n
        code //= n
        c = code % n
        code //= n
        return cls(n, code // n, code % n, c, d)


def mat_product(A: Mat2, B: Mat2) -> Mat2:
    if A.modulus != B.modulus:
        raise InputError(f"modulus mismatch: {A.modulus} vs {B.modulus}")
    return Mat2(
        A.modulus,
        A.a * B.a + A.b * B.c,
        A.a * B.b + A.b * B.d,
        A.c * B.a + A.d * B.c,
        A.c * B.b + A.d * B.d,
    )


def mat_det_trace_inv(A: Mat2) -> tuple[int, int, Mat2 | None]:
    return A.det, A.trace, A.inverse()


def _crt_basis(n1: int, n2: int) -> tuple[int, int]:
    """Idempotents e1, e2 mod n1*n2 with e1 = 1 mod n1, 0 mod n2 and vice versa."""
    if n1 < 1 or n2 < 1 or math.gcd(n1, n2) != 1:
        raise InputError(f"CRT needs coprime positive moduli, got {n1} and {n2}")
    n = n1 * n2
    e1 = n2 * pow(n2, -1, n1) % n if n1 > 1 else 0
    e2 = n1 * pow(n1, -1, n2) % n if n2 > 1 else 0
    return e1, e2


def crt_split(A: Mat2, n1: int, n2: int) -> tuple[Mat2, Mat2]:
    if n1 * n2 != A.modulus:
        raise InputError(f"{n1}*{n2} != modulus {A.modulus}")
    _crt_basis(n1, n2)
    return project(A, n1), project(A, n2)


def crt_join(A1: Mat2, A2: Mat2) -> Mat2:
    n1, n2 = A1.modulus, A2.modulus
    e1, e2 = _crt_basis(n1, n2)
    return Mat2(
        n1 * n2,
        *(x * e1 + y * e2 for x, y in zip((A1.a, A1.b, A1.c, A1.d), (A2.a, A2.b, A2.c, A2.d))),
    )


def project(A: Mat2, d: int) -> Mat2:
    if d < 1 or A.modulus % d:
        raise InputError(f"{d} does not divide modulus {A.modulus}")
    return Mat2(d, A.a, A.b, A.c, A.d)


# ---------------------------------------------------------------------------
# vectorised codes


@dataclass(frozen=True)
class GL2Codec:
    """Arithmetic on int64 arrays of matrix codes modulo ``n``."""

    n: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_CODEC_MODULUS:
            raise InputError(f"modulus {self.n} outside 1..{MAX_CODEC_MODULUS}")

    @property
    def size(self) -> int:
        return self.n**4

    @property
    def identity(self) -> int:
        return Mat2.identity(self.n).code

    def decode(self, x):
        n = self.n
        x = np.asarray(x, dtype=np.int64)
        d = x % n
        x = x // n
        c = x % n
        x = x // n
        return x // n, x % n, c, d

    def encode(self, a, b, c, d):
        n = self.n
        return ((np.asarray(a, dtype=np.int64) % n * n + b % n) * n + c % n) * n + d % n

    def mul(self, x, y):
        n = self.n
        a, b, c, d = self.decode(x)
        e, f, g, h = self.decode(y)
        return (
            (((a * e + b * g) % n * n + (a * f + b * h) % n) * n + (c * e + d * g) % n) * n
            + (c * f + d * h) % n
        )

    def det(self, x):
        a, b, c, d = self.decode(x)
        return (a * d - b * c) % self.n

    def trace(self, x):
        a, _, _, d = self.decode(x)
        return (a + d) % self.n

    def inv(self, x):
        n = self.n
        a, b, c, d = self.decode(x)
        e = _inverse_table(n)[(a * d - b * c) % n]
        if np.any(e < 0):
            raise InputError("non-invertible matrix code")
        return self.encode(d * e, -b * e, -c * e, a * e)

    def to_mat(self, code) -> Mat2:
        return Mat2.from_code(int(code), self.n)

    def from_mats(self, mats: Iterable[Mat2]) -> np.ndarray:
        out = []
        for m in mats:
            if m.modulus != self.n:
                raise InputError(f"matrix {m} has modulus {m.modulus}, expected {self.n}")
            out.append(m.code)
        return np.array(out, dtype=np.int64)


@lru_cache(maxsize=None)
def _inverse_table(n: int) -> np.ndarray:
    table = np.full(n, -1, dtype=np.int64)
    for u in range(n):
        if math.gcd(u, n) == 1:
            table[u] = pow(u, -1, n) if n > 1 else 0
    return table


@lru_cache(maxsize=None)
def gl2_codes(n: int) -> np.ndarray:
    """All of GL_2(Z/nZ) as a sorted code array, by direct enumeration."""
    codec = GL2Codec(n)
    codes = np.arange(codec.size, dtype=np.int64)
    units = _inverse_table(n) >= 0
    codes = codes[units[codec.det(codes)]]
    codes.setflags(write=False)
    return codes


def project_codes(codes, n: int, d: int) -> np.ndarray:
    """Entrywise reduction of mod-n codes to mod-d codes."""
    if d < 1 or n % d:
        raise InputError(f"{d} does not divide {n}")
    a, b, c, e = GL2Codec(n).decode(codes)
    return GL2Codec(d).encode(a, b, c, e)


def crt_split_codes(codes, n1: int, n2: int) -> tuple[np.ndarray, np.ndarray]:
    _crt_basis(n1, n2)
    return project_codes(codes, n1 * n2, n1), project_codes(codes, n1 * n2, n2)


def crt_join_codes(codes1, n1: int, codes2, n2: int) -> np.ndarray:
    """Elementwise CRT lift of paired mod-n1 and mod-n2 codes (broadcasting)."""
    e1, e2 = _crt_basis(n1, n2)
    n = n1 * n2
    p = GL2Codec(n1).decode(codes1)
    q = GL2Codec(n2).decode(codes2)
    return GL2Codec(n).encode(*((x * e1 + y * e2) % n for x, y in zip(p, q)))


def preimage_codes(codes_d, d: int, n: int) -> np.ndarray:
    """Sorted codes of GL_2(Z/nZ) reducing mod d into the given code set."""
    full = gl2_codes(n)
    target = np.zeros(GL2Codec(d).size, dtype=bool)
    target[np.asarray(codes_d, dtype=np.int64)] = True
    return full[target[project_codes(full, n, d)]]
