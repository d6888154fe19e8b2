"""Random instance generators for the block, commutator and exterior-square suites.

Each generator returns plain tuples; the checks live in the tests.
"""

import random

from abelsup.field import field_of_order, make_field
from abelsup.linear import build_A, build_X
from abelsup.semimat import Mat, inverse, mat_prod, transpose
from oracles import random_gl

BLOCK_Q = (5, 7, 9, 11, 13, 25, 27, 49)
UBLOCK_Q = (3, 5, 7, 9)


def solutions(a, b, M):
    """All c in [0, M) with a*c = b mod M."""
    return [c for c in range(M) if (a * c - b) % M == 0]


def block_instances(rng: random.Random, count: int):
    """(f, w, l, s, eps, c) with c*w = l*p^s*(-1)^eps - l mod q-1."""
    out = []
    while len(out) < count:
        q = rng.choice(BLOCK_Q)
        f = field_of_order(q)
        w, l = rng.randint(2, 6), rng.randrange(q - 1)
        s, eps = rng.randrange(f.m), rng.randrange(2)
        cs = solutions(w, l * f.p ** s * (-1) ** eps - l, q - 1)
        if cs:
            out.append((f, w, l, s, eps, rng.choice(cs)))
    return out


def ublock_instances(rng: random.Random, count: int):
    """(F, q, w, l, s, c) over F_{q^2} with c*w = l*(p^s - 1) mod q+1."""
    out = []
    while len(out) < count:
        q = rng.choice(UBLOCK_Q)
        f0 = field_of_order(q)
        F = make_field(f0.p, 2 * f0.m)
        w, l, s = rng.randint(2, 6), rng.randrange(q + 1), rng.randrange(2 * f0.m)
        cs = solutions(w, l * (f0.p ** s - 1), q + 1)
        if cs:
            out.append((F, q, w, l, s, rng.choice(cs)))
    return out


def gx_instances(rng: random.Random, count: int):
    """(f, w, s, alpha, beta) with beta = 2 alpha + p^s beta mod q-1, w <= 5."""
    out = []
    while len(out) < count:
        q = rng.choice(BLOCK_Q)
        f = field_of_order(q)
        w, s, a = rng.randint(2, 5), rng.randrange(f.m), rng.randrange(q - 1)
        bs = solutions(1 - f.p ** s, 2 * a, q - 1)
        if bs:
            out.append((f, w, s, a, rng.choice(bs)))
    return out


def _sqrt(f, y, rng):
    roots = [x for x in range(1, f.q) if f.mul(x, x) == y]
    return rng.choice(roots) if roots else None


def comm_positive(rng: random.Random, f, n: int, s: int):
    """(A, B) with B = tA B^[p^s] A: a diagonal solution moved by G in GL_n(p)."""
    while True:
        bs = [f.w(rng.randrange(f.q - 1)) for _ in range(n)]
        a = [_sqrt(f, f.div(b, f.pow(b, f.p ** s)), rng) for b in bs]
        if None not in a:
            break
    G = random_gl(f, rng, n, prime_subfield=True)
    return mat_prod(inverse(G), Mat.diag(f, a), G), mat_prod(transpose(G), Mat.diag(f, bs), G)


def comm_instances(rng: random.Random, count: int):
    """Half constructed solutions, half random pairs: (f, n, s, A, B)."""
    out = []
    for i in range(count):
        f = field_of_order(rng.choice((5, 7, 9, 25, 27)))
        n, s = rng.randint(2, 4), rng.randrange(f.m)
        if i % 2 == 0:
            A, B = comm_positive(rng, f, n, s)
        else:
            A, B = random_gl(f, rng, n), random_gl(f, rng, n)
        out.append((f, n, s, A, B))
    return out


# -- instances for the exterior-square implications -------------------------

def equival_first(rng, f):
    """(X, Y, z) with Y^-1 X^[p] Y = z X."""
    while True:
        l = rng.randrange(f.q - 1)
        cs = solutions(4, l * f.p - l, f.q - 1)
        if cs:
            break
    c = rng.choice(cs)
    G = random_gl(f, rng, 4, prime_subfield=True)
    Gi = inverse(G)
    X, Y = build_A(f, 4, l), build_X(f, 4, c)
    return mat_prod(Gi, X, G), mat_prod(Gi, Y, G), f.w(c)


def equival_second(rng, f):
    """(X, Y, z) with Y^-1 tX^-1 Y = z X."""
    while True:
        l = rng.randrange(f.q - 1)
        cs = solutions(4, -2 * l, f.q - 1)
        if cs:
            break
    c = rng.choice(cs)
    G = random_gl(f, rng, 4)
    X, Y = build_A(f, 4, l), build_X(f, 4, c)
    return mat_prod(inverse(G), X, G), mat_prod(transpose(G), Y, G), f.w(c)


def equival_third(rng, f):
    """(X, Y, z) with tX^-1 Y = z Y^[p] X."""
    while True:
        z = f.w(rng.randrange(f.q - 1))
        ys = [f.w(rng.randrange(f.q - 1)) for _ in range(4)]
        xs = [_sqrt(f, f.div(f.inv(f.pow(y, f.p - 1)), z), rng) for y in ys]
        if None not in xs:
            break
    G = random_gl(f, rng, 4, prime_subfield=True)
    X, Y = Mat.diag(f, xs), Mat.diag(f, ys)
    return mat_prod(inverse(G), X, G), mat_prod(transpose(G), Y, G), z
