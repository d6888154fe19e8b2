"""Independent reference implementations used by the tests.

Nothing here imports the arithmetic it checks: field elements are handled as
coefficient lists and multiplied by schoolbook polynomial arithmetic.
"""

import random

import numpy as np


def poly_mulmod(a, b, modulus, p):
    """Product of coefficient lists (low order first) modulo the monic polynomial x^m + sum modulus[i] x^i."""
    m = len(modulus)
    prod = [0] * (2 * m)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    for k in range(2 * m - 1, m - 1, -1):
        c = prod[k]
        if c:
            prod[k] = 0
            for i in range(m):
                prod[k - m + i] = (prod[k - m + i] - c * modulus[i]) % p
    return prod[:m]


class RefField:
    """Arithmetic on coefficient vectors; conversion to the library's integer encoding."""

    def __init__(self, p, modulus):
        self.p, self.mod, self.m = p, tuple(modulus), len(modulus)

    def enc(self, coeffs):
        return sum(c * self.p ** i for i, c in enumerate(coeffs))

    def dec(self, x):
        out = []
        for _ in range(self.m):
            out.append(x % self.p)
            x //= self.p
        return out

    def mul(self, x, y):
        return self.enc(poly_mulmod(self.dec(x), self.dec(y), self.mod, self.p))

    def add(self, x, y):
        return self.enc([(a + b) % self.p for a, b in zip(self.dec(x), self.dec(y))])

    def pow(self, x, k):
        out = self.enc([1] + [0] * (self.m - 1))
        for _ in range(k):
            out = self.mul(out, x)
        return out


def ref_field(f):
    return RefField(f.p, f.modulus_poly)


def mat_mul_ref(R, A, B):
    n = len(A)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = 0
            for k in range(n):
                acc = R.add(acc, R.mul(A[i][k], B[k][j]))
            row.append(acc)
        out.append(row)
    return out


def random_gl(f, rng: random.Random, n: int, prime_subfield: bool = False):
    """A random invertible n x n matrix (entries in F_p if prime_subfield)."""
    from abelsup.semimat import Mat, det

    while True:
        vals = [f.from_int(v) for v in range(f.p)] if prime_subfield else list(range(f.q))
        G = Mat(f, [[rng.choice(vals) for _ in range(n)] for _ in range(n)])
        if det(G):
            return G


# -- reflections on root coordinates, straight from the Cartan matrix

def root_reflection(C, i):
    """s_i(alpha_j) = alpha_j - <alpha_j, alpha_i^vee> alpha_i, columns are images."""
    n = len(C)
    S = np.eye(n, dtype=np.int64)
    for j in range(n):
        S[i, j] -= C[j][i]
    return S


def oracle_one_minus_w(rs, order):
    W = np.eye(rs.n, dtype=np.int64)
    for i in order:
        W = W @ root_reflection(rs.cartan, i)
    return np.eye(rs.n, dtype=np.int64) - W
