"""Arithmetic in small finite fields: prime fields GF(p) and binary GF(2^m).

Elements are plain ints in ``[0, q)``.  For a binary field the int is the
bit pattern of the polynomial (bit ``i`` is the coefficient of ``x^i``).

A :class:`FieldSpec` carries scalar operations (``add``, ``mul``, ...) for
the matrix code and numpy counterparts (``vadd``, ``vmul``, ...) used by the
bulk data path and the exhaustive oracle.
"""

from __future__ import annotations

import functools
import re

import numpy as np

from .errors import (
    BadFieldDescriptor,
    DivisionByZero,
    NoGeneratorFound,
    NotPrime,
    ReducibleModulus,
)

MAX_ORDER = 1 << 16

# Primitive polynomials, one per degree; 0x11D is the usual Reed-Solomon choice.
DEFAULT_MODULI = {
    1: 0x3,
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x89,
    8: 0x11D,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def clmul(a: int, b: int) -> int:
    """Carry-less product of two bit polynomials."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def polymod(a: int, modulus: int) -> int:
    """Remainder of bit polynomial ``a`` modulo ``modulus``."""
    deg = modulus.bit_length() - 1
    while a.bit_length() - 1 >= deg:
        a ^= modulus << (a.bit_length() - 1 - deg)
    return a


def is_irreducible(poly: int) -> bool:
    """Trial division by every polynomial of degree 1..deg/2 over GF(2)."""
    deg = poly.bit_length() - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for f in range(1 << d, 1 << (d + 1)):
            if polymod(poly, f) == 0:
                return False
    return True


class FieldSpec:
    """A concrete finite field with a designated primitive element.

    Build instances through :func:`prime_field`, :func:`binary_field` or
    :func:`parse_field`; those are cached so equal fields are the same object.
    """

    __slots__ = (
        "kind", "p", "m", "modulus", "order", "generator",
        "_exp", "_log", "_exp_np", "_log_np", "_inv",
    )

    def __init__(self, kind: str, p: int = 2, m: int = 1, modulus: int = 0):
        self.kind = kind
        self.p = p
        self.m = m
        self.modulus = modulus
        if kind == "prime":
            if not is_prime(p):
                raise NotPrime(f"{p} is not prime")
            self.order = p
        elif kind == "binary":
            if not 1 <= m <= 16:
                raise BadFieldDescriptor(f"binary degree {m} outside 1..16")
            if modulus.bit_length() - 1 != m or not is_irreducible(modulus):
                raise ReducibleModulus(f"{modulus:#x} is not irreducible of degree {m}")
            self.order = 1 << m
        else:
            raise BadFieldDescriptor(f"unknown field kind {kind!r}")
        if self.order > MAX_ORDER:
            raise BadFieldDescriptor(f"field order {self.order} exceeds {MAX_ORDER}")

        self.generator = self._find_generator()
        q = self.order
        exp = [0] * (2 * (q - 1) if q > 2 else 2)
        log = [0] * q
        x = 1
        for i in range(q - 1):
            exp[i] = x
            log[x] = i
            x = self._slow_mul(x, self.generator)
        for i in range(q - 1, len(exp)):
            exp[i] = exp[i - (q - 1)]
        self._exp = exp
        self._log = log
        self._exp_np = np.asarray(exp, dtype=np.int64)
        self._log_np = np.asarray(log, dtype=np.int64)
        inv = [0] * q
        for a in range(1, q):
            inv[a] = exp[(q - 1 - log[a]) % (q - 1)]
        self._inv = inv

    # construction helpers ------------------------------------------------

    def _slow_mul(self, a: int, b: int) -> int:
        if self.kind == "prime":
            return a * b % self.p
        return polymod(clmul(a, b), self.modulus)

    def _find_generator(self) -> int:
        q = self.order
        if q == 2:
            return 1
        factors = _prime_factors(q - 1)
        for g in range(2, q):
            if all(self._slow_pow(g, (q - 1) // f) != 1 for f in factors):
                return g
        raise NoGeneratorFound(f"no primitive element in {self}")

    def _slow_pow(self, a: int, e: int) -> int:
        out = 1
        while e:
            if e & 1:
                out = self._slow_mul(out, a)
            a = self._slow_mul(a, a)
            e >>= 1
        return out

    # identity ------------------------------------------------------------

    @property
    def q(self) -> int:
        return self.order

    @property
    def characteristic(self) -> int:
        return self.p if self.kind == "prime" else 2

    def _key(self):
        return (self.kind, self.p, self.m, self.modulus)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"FieldSpec({self.descriptor()!r})"

    def descriptor(self) -> str:
        """The CLI spelling of this field (``gf:p=11``, ``gf:2^8``, ...)."""
        if self.kind == "prime":
            return f"gf:p={self.p}"
        if self.modulus == DEFAULT_MODULI[self.m]:
            return f"gf:2^{self.m}"
        return f"gf:2^{self.m}/{self.modulus:#x}"

    def elements(self) -> range:
        return range(self.order)

    # scalar arithmetic ---------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.kind == "binary":
            return a ^ b
        return (a + b) % self.p

    def neg(self, a: int) -> int:
        if self.kind == "binary":
            return a
        return -a % self.p

    def sub(self, a: int, b: int) -> int:
        if self.kind == "binary":
            return a ^ b
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        if self.kind == "prime":
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero")
        return self._inv[a]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise DivisionByZero("zero to a negative power")
            return 1 if e == 0 else 0
        return self._exp[(self._log[a] * e) % (self.order - 1)]

    def alpha_pow(self, e: int) -> int:
        """``generator ** e`` for any integer ``e``."""
        return self._exp[e % (self.order - 1)]

    def log(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("log of zero")
        return self._log[a]

    # vectorised arithmetic ----------------------------------------------

    def vadd(self, a, b):
        if self.kind == "binary":
            return np.bitwise_xor(a, b)
        return (np.asarray(a, dtype=np.int64) + b) % self.p

    def vneg(self, a):
        if self.kind == "binary":
            return np.asarray(a)
        return (-np.asarray(a, dtype=np.int64)) % self.p

    def vmul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.kind == "prime":
            return a * b % self.p
        out = self._exp_np[self._log_np[a] + self._log_np[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def vmatmul(self, a, b):
        """Batched matrix product over the field, numpy broadcasting rules."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.kind == "prime":
            return np.matmul(a, b) % self.p
        inner = a.shape[-1]
        acc = None
        for t in range(inner):
            term = self.vmul(a[..., :, t, None], b[..., None, t, :])
            acc = term if acc is None else acc ^ term
        return acc

    def scale_table(self, c: int) -> np.ndarray:
        """Lookup vector ``v`` with ``v[x] == c * x`` for every element ``x``."""
        return self.vmul(np.full(self.order, c), np.arange(self.order))


@functools.lru_cache(maxsize=None)
def prime_field(p: int) -> FieldSpec:
    return FieldSpec("prime", p=p)


@functools.lru_cache(maxsize=None)
def binary_field(m: int, modulus: int | None = None) -> FieldSpec:
    if modulus is None:
        if m not in DEFAULT_MODULI:
            raise BadFieldDescriptor(f"no default modulus for 2^{m}")
        modulus = DEFAULT_MODULI[m]
    return FieldSpec("binary", m=m, modulus=modulus)


def field_new(kind: str, value: int, modulus: int | None = None) -> FieldSpec:
    """Build a field from ``("prime", p)`` or ``("binary", m[, modulus])``."""
    if kind == "prime":
        return prime_field(value)
    if kind == "binary":
        return binary_field(value, modulus)
    raise BadFieldDescriptor(f"unknown field kind {kind!r}")


def primitive_element(field: FieldSpec) -> int:
    return field.generator


_DESC = re.compile(r"^gf:(?:p=(\d+)|2\^(\d+)(?:/(0x[0-9a-fA-F]+))?)$")


def parse_field(desc: str) -> FieldSpec:
    """Parse ``gf:p=<prime>``, ``gf:2^<m>`` or ``gf:2^<m>/0x<poly>``."""
    match = _DESC.match(desc.strip())
    if not match:
        raise BadFieldDescriptor(f"cannot parse field descriptor {desc!r}")
    p, m, poly = match.groups()
    if p is not None:
        p = int(p)
        if p > MAX_ORDER:
            raise BadFieldDescriptor(f"field order {p} exceeds {MAX_ORDER}")
        return prime_field(p)
    return binary_field(int(m), int(poly, 16) if poly else None)


GF256 = binary_field(8)
