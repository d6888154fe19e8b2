"""Finite fields small enough to tabulate.

Elements of F_q (q = p^m) are plain ints in ``range(q)``.  The int ``x`` encodes
the polynomial whose coefficient of ``X^i`` is the i-th base-p digit of ``x``, so
0 and 1 are the field's zero and one, and for m = 1 the encoding is the residue
itself.  Multiplication goes through exp/log tables, addition through a Zech
logarithm table, so every operation is O(1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

DEFAULT_TABLE_BOUND = 1 << 16


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    i = 2
    while i * i <= n:
        if n % i == 0:
            out.append(i)
            while n % i == 0:
                n //= i
        i += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, m) with q = p^m, or raise FieldError."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    for p in prime_factors(q)[:1]:
        m, r = 0, q
        while r % p == 0:
            r //= p
            m += 1
        if r == 1:
            return p, m
    raise FieldError(f"{q} is not a prime power")


def _digits(x: int, p: int, m: int) -> list[int]:
    out = []
    for _ in range(m):
        out.append(x % p)
        x //= p
    return out


def _undigits(ds, p: int) -> int:
    x = 0
    for d in reversed(ds):
        x = x * p + d
    return x


def _polymulx_mod(v: list[int], poly: list[int], p: int) -> list[int]:
    # multiply the residue v by X modulo the monic poly (coefficients low to high)
    m = len(v)
    top = v[-1]
    out = [0] + v[:-1]
    if top:
        for i in range(m):
            out[i] = (out[i] - top * poly[i]) % p
    return out


def _primitive_poly(p: int, m: int) -> tuple[list[int], list[list[int]]]:
    """Least primitive monic polynomial of degree m and the powers of its root.

    Candidates are ordered lexicographically on (c_{m-1}, ..., c_0), the
    coefficients below the leading one read from the top down.
    """
    q = p ** m
    for tail in product(range(p), repeat=m):
        poly = list(reversed(tail))  # poly[i] = coefficient of X^i
        if poly[0] == 0:
            continue
        powers = []
        v = [0] * m
        v[0] = 1
        ok = True
        for k in range(q - 1):
            if k and all(c == 0 for c in v[1:]) and v[0] == 1:
                ok = False
                break
            powers.append(v)
            v = _polymulx_mod(v, poly, p)
        if ok and v == [1] + [0] * (m - 1):
            return poly, powers
    raise FieldError(f"no primitive polynomial of degree {m} over F_{p}")


@dataclass(frozen=True, eq=False)
class FieldSpec:
    p: int
    m: int
    q: int
    modulus_poly: tuple[int, ...]
    omega: int
    exp: tuple[int, ...] = field(repr=False)
    log: tuple[int, ...] = field(repr=False)
    zech: tuple[int, ...] = field(repr=False)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and (self.p, self.m) == (other.p, other.m)

    def __hash__(self):
        return hash((self.p, self.m))

    def __reduce__(self):
        return (make_field, (self.p, self.m, max(self.q, DEFAULT_TABLE_BOUND)))

    # arithmetic -----------------------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        if a == 0:
            return b
        if b == 0:
            return a
        la = self.log[a]
        z = self.zech[(self.log[b] - la) % (self.q - 1)]
        if z < 0:
            return 0
        return self.exp[(la + z) % (self.q - 1)]

    def neg(self, a: int) -> int:
        if self.m == 1:
            return (-a) % self.p
        if a == 0 or self.p == 2:
            return a
        return self.exp[(self.log[a] + (self.q - 1) // 2) % (self.q - 1)]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        return self.exp[(self.log[a] + self.log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self.exp[(-self.log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k < 0:
                raise ZeroDivisionError("negative power of zero")
            return 1 if k == 0 else 0
        return self.exp[(self.log[a] * k) % (self.q - 1)]

    def w(self, k: int) -> int:
        """omega^k for any integer k."""
        return self.exp[k % (self.q - 1)]

    def from_int(self, k: int) -> int:
        """Image of the integer k under Z -> F_p -> F_q."""
        return k % self.p

    def elements(self) -> range:
        return range(self.q)

    def coefficients(self, x: int) -> list[int]:
        return _digits(x, self.p, self.m)

    def from_coefficients(self, coeffs) -> int:
        cs = [c % self.p for c in coeffs]
        if len(cs) > self.m:
            raise FieldError("too many coefficients")
        return _undigits(cs + [0] * (self.m - len(cs)), self.p)

    def is_square(self, a: int) -> bool:
        if a == 0:
            return True
        return self.p == 2 or self.log[a] % 2 == 0

    def order(self, a: int) -> int:
        if a == 0:
            raise FieldError("zero has no multiplicative order")
        from math import gcd

        return (self.q - 1) // gcd(self.log[a], self.q - 1)

    def __str__(self):
        return f"GF({self.q})"


_CACHE: dict[tuple[int, int], FieldSpec] = {}


def make_field(p: int, m: int = 1, table_bound: int = DEFAULT_TABLE_BOUND) -> FieldSpec:
    """Build F_{p^m} with a primitive element omega and full log tables."""
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if m < 1:
        raise FieldError("degree must be positive")
    q = p ** m
    if q > table_bound:
        raise FieldError(f"q = {q} exceeds the table bound {table_bound}")
    key = (p, m)
    if key in _CACHE:
        return _CACHE[key]
    if m == 1:
        if p == 2:
            omega, poly = 1, (1,)
        else:
            fac = prime_factors(p - 1)
            omega = next(g for g in range(2, p) if all(pow(g, (p - 1) // r, p) != 1 for r in fac))
            poly = ((-omega) % p,)
        exp = [pow(omega, k, p) for k in range(p - 1)]
    else:
        plist, powers = _primitive_poly(p, m)
        poly = tuple(plist)
        exp = [_undigits(v, p) for v in powers]
        omega = exp[1]
    log = [0] * q
    log[0] = -1
    for k, x in enumerate(exp):
        log[x] = k
    zech = [-1] * max(q - 1, 1)
    for k, x in enumerate(exp):
        ds = _digits(x, p, m)
        ds[0] = (ds[0] + 1) % p
        y = _undigits(ds, p)
        zech[k] = log[y] if y else -1
    f = FieldSpec(p, m, q, poly, omega, tuple(exp), tuple(log), tuple(zech))
    _CACHE[key] = f
    return f


def field_of_order(q: int, table_bound: int = DEFAULT_TABLE_BOUND) -> FieldSpec:
    p, m = prime_power(q)
    return make_field(p, m, table_bound)


def dlog(f: FieldSpec, x: int) -> int:
    """Exponent e in [0, q-2] with omega^e = x."""
    if x == 0:
        raise FieldError("discrete log of zero")
    return f.log[x]


def frob(f: FieldSpec, x: int, s: int) -> int:
    """x^(p^s)."""
    if x == 0:
        return 0
    return f.exp[(f.log[x] * pow(f.p, s % f.m, f.q - 1)) % (f.q - 1)] if f.q > 2 else x
