"""Supplements for PSL_n(q): companion blocks, diagonal twists and the dispatcher.

The matrices ``A_{w,l}`` (companion-style, determinant ``omega^l``) and ``X_{w,c}``
(diagonal powers of ``omega^c``) are the building blocks.  Under a congruence on
``(w, l, c)`` a field/graph twist of ``A_{w,l}`` followed by conjugation with
``X_{w,c}`` rescales ``A_{w,l}`` by ``omega^c``; direct sums of such blocks give
commuting generators modulo scalars.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Optional, Sequence

from .field import FieldSpec, dlog, field_of_order
from .outgroup import AbelianT, Elt, OutModel, make_T, enumerate_maximal_abelian
from .semimat import (
    INVERSE_TRANSPOSE,
    CenterSpec,
    GraphMap,
    Mat,
    MatrixError,
    SemilinearWord,
    block_diag,
    compose,
    conjugate_word,
    det,
    mat_pow,
    scale,
    word_inverse,
)


class ConstructionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# building blocks

def build_A(f: FieldSpec, w: int, l: int, step: int = 1) -> Mat:
    """Companion-style matrix with subdiagonal ones and corner (-1)^(w-1) * omega^l.

    ``step`` is the exponent of the working ``omega`` in terms of the field's
    primitive element (1 for linear groups, q-1 for unitary ones).
    """
    if w < 2:
        raise ConstructionError("A_{w,l} needs w >= 2")
    rows = [[0] * w for _ in range(w)]
    for i in range(1, w):
        rows[i][i - 1] = 1
    corner = f.w(l * step)
    rows[0][w - 1] = corner if (w - 1) % 2 == 0 else f.neg(corner)
    return Mat(f, rows)


def build_X(f: FieldSpec, w: int, c: int, step: int = 1) -> Mat:
    """diag(omega^(c(w-1)), ..., omega^c, 1)."""
    if w < 2:
        raise ConstructionError("X_{w,c} needs w >= 2")
    return Mat.diag(f, [f.w(c * (w - 1 - i) * step) for i in range(w)])


def delta_matrix(f: FieldSpec, n: int, e: int, step: int = 1) -> Mat:
    """diag(omega^e, 1, ..., 1), the standard representative of delta^e."""
    return Mat.diag(f, [f.w(e * step)] + [1] * (n - 1))


def block_congruence_holds(q: int, p: int, w: int, l: int, c: int, s: int, eps: int) -> bool:
    return (c * w - (l * p ** s * (-1) ** eps - l)) % (q - 1) == 0


def find_y(n: int, d: int, M: int, t: int) -> int:
    """Least y in [1, M] with y*n = d mod M and gcd(y, t) = 1."""
    for y in range(1, M + 1):
        if (y * n - d) % M == 0 and gcd(y, t) == 1:
            return y
    raise ConstructionError(f"no y for n={n}, d={d}, M={M}, t={t}")


def find_odd_y(n: int, d: int, M: int) -> int:
    for y in range(1, 2 * M + 1, 2):
        if (y * n - d) % M == 0:
            return y
    raise ConstructionError(f"no odd y for n={n}, d={d}, M={M}")


def bezout(a: int, b: int) -> tuple[int, int]:
    """(x, y) with a*x + b*y = gcd(a, b)."""
    if b == 0:
        return (1 if a >= 0 else -1), 0
    x, y = bezout(b, a % b)
    return y, x - (a // b) * y


# ---------------------------------------------------------------------------
# contexts: how words are built, lifted from Out and projected back

@dataclass
class Supplement:
    """Generators of a T-abelian supplement together with the target T."""

    words: tuple
    T: AbelianT
    center: CenterSpec
    route: str
    notes: dict = field(default_factory=dict)


# the name used for the linear family
PslSupplement = Supplement


class LinearContext:
    """GL_n(q) with inverse transpose as graph map; delta = class of det."""

    kind = "linear"

    def __init__(self, om: OutModel):
        if om.family != "psl":
            raise ConstructionError("linear context needs a psl model")
        self.om = om
        self.n = om.n
        self.f = field_of_order(om.q)
        self.step = 1
        self.graph: GraphMap = INVERSE_TRANSPOSE
        self.forder = om.forder
        self.center = CenterSpec()
        self.dmod = om.q - 1

    def word(self, s: int, eps: int, X: Mat) -> SemilinearWord:
        return SemilinearWord(s, eps, X, self.graph, self.forder)

    def identity(self) -> Mat:
        return Mat.identity(self.f, self.n)

    def A(self, w, l):
        return build_A(self.f, w, l, self.step)

    def X(self, w, c):
        return build_X(self.f, w, c, self.step)

    def omega_scalar(self, e: int) -> int:
        return self.f.w(e * self.step)

    def det_exponent(self, X: Mat) -> int:
        """dlog of det X with respect to the working omega."""
        e = dlog(self.f, det(X))
        if e % self.step:
            raise MatrixError("determinant outside the working cyclic group")
        return (e // self.step) % self.dmod

    def check_word(self, w: SemilinearWord) -> None:
        if det(w.X) == 0:
            raise MatrixError("singular matrix part")

    def lift(self, x: Elt) -> SemilinearWord:
        return self.word(x[0], x[1], delta_matrix(self.f, self.n, x[2], self.step))

    def rho(self, w: SemilinearWord) -> Elt:
        self.check_word(w)
        return self.om.elt(w.s, w.eps, [self.det_exponent(w.X) % self.om.d])


# ---------------------------------------------------------------------------
# generic pieces shared by the classical families

def rho_subgroup(ctx, words: Sequence[SemilinearWord]) -> frozenset:
    return ctx.om.subgroup([ctx.rho(w) for w in words])


def cyclic_lift(ctx, T: AbelianT) -> Supplement:
    """A single lifted generator: any cyclic T lifts to a cyclic supplement."""
    om = ctx.om
    gen = next((x for x in sorted(T.elements) if om.order_of(x) == len(T.elements)), None)
    if gen is None:
        raise ConstructionError("T is not cyclic")
    return Supplement((ctx.lift(gen),), T, ctx.center, "cyclic-lift", {"generator": om.fmt(gen)})


def conjugate_supplement(ctx, words, y: Elt):
    Y = ctx.lift(y)
    return tuple(conjugate_word(w, Y) for w in words)


def word_power(w: SemilinearWord, e: int) -> SemilinearWord:
    if e < 0:
        w, e = word_inverse(w), -e
    out = SemilinearWord(0, 0, Mat.identity(w.f, w.X.n), w.graph, w.forder)
    for _ in range(e):
        out = compose(out, w)
    return out


def restrict_supplement(ctx, sup: Supplement, T: AbelianT) -> Supplement:
    """Given a supplement for T* >= T, lift generators of T to products of its words."""
    om = ctx.om
    imgs = [ctx.rho(w) for w in sup.words]
    # discrete search for exponent vectors; T* is small
    table = {om.identity: ()}
    frontier = [((0,) * len(imgs), om.identity)]
    while frontier:
        nxt = []
        for ev, x in frontier:
            for i, g in enumerate(imgs):
                y = om.mul(x, g)
                if y not in table:
                    e2 = list(ev)
                    e2[i] += 1
                    table[y] = tuple(e2)
                    nxt.append((tuple(e2), y))
        frontier = nxt
    words = []
    for g in T.generators:
        ev = table.get(g)
        if ev is None:
            raise ConstructionError("T is not contained in the supplied supplement's image")
        w0 = sup.words[0]
        w = SemilinearWord(0, 0, Mat.identity(w0.f, w0.X.n), w0.graph, w0.forder)
        for i, e in enumerate(ev or ()):
            w = compose(w, word_power(sup.words[i], e))
        words.append(w)
    notes = dict(sup.notes)
    notes["restricted_from"] = sup.T.label(om)
    return Supplement(tuple(words), T, ctx.center, sup.route + "+restriction", notes)


def containing_maximal(om: OutModel, T: AbelianT) -> AbelianT:
    for M in enumerate_maximal_abelian(om):
        if T.elements <= M.elements:
            return M
    raise ConstructionError("no maximal abelian subgroup contains T")


def split_cyclic_top(om: OutModel, T: AbelianT):
    """For cyclic delta: (k, x) with T = <delta^k, x> and pi(T) = <pi(x)>, or None if pi(T) is not cyclic."""
    delta_part = sorted(x[2] for x in T.elements if x[0] == 0 and x[1] == 0)
    k = next((v for v in delta_part if v), om.d)
    top = frozenset(om.field_graph_part(x) for x in T.elements)
    for x in sorted(T.elements):
        if om.order_of(om.field_graph_part(x)) == len(top):
            return k, x
    return None


# ---------------------------------------------------------------------------
# PSL_2

def psl2_supplement(om: OutModel, T: Optional[AbelianT] = None) -> Supplement:
    """<A, phi B> with A = [[0, -omega], [1, 0]] and B = diag(omega^((p-1)/2), 1)."""
    ctx = LinearContext(om)
    if T is None:
        T = make_T(om, om.elements)
    f = ctx.f
    if om.is_cyclic(T.elements):
        return cyclic_lift(ctx, T)
    if f.p == 2:
        raise ConstructionError("even q gives cyclic Out")
    A = build_A(f, 2, 1)
    B = Mat.diag(f, [f.w((f.p - 1) // 2), 1])
    return Supplement((ctx.word(0, 0, A), ctx.word(1, 0, B)), T, ctx.center, "psl2", {})


# ---------------------------------------------------------------------------
# PSL_n, n >= 3

def pgammal_words(ctx, k: int, s: int, eps: int, j: int, M: int):
    """Generators for T = <delta^k, phi^s gamma^eps delta^j> with k | d, k != d.

    ``M`` is the order of the working omega (q-1 linear, q+1 unitary).
    Returns (words, branch, notes).
    """
    n, d, p = ctx.n, ctx.om.d, ctx.om.p
    t = d // k
    sign = -1 if eps else 1
    e = sign * p ** s - 1
    if e % t:
        raise ConstructionError("T is not abelian: t does not divide (+-p^s - 1)")
    if t == n:
        c = e // n
        A = ctx.A(n, 1)
        X = ctx.X(n, c)
        return (ctx.word(0, 0, A), ctx.word(s, eps, X)), "t=n", {"c": c}
    y = find_y(n, d, M, t)
    r = e // t
    A = block_diag([ctx.A(t, y), ctx.A(n - t, k - y)])
    X = block_diag([ctx.X(t, y * r), ctx.X(n - t, y * r)])
    a, b = bezout(y, t)
    C0 = scale(mat_pow(ctx.A(t, y), a), ctx.omega_scalar(b))
    C = block_diag([C0, Mat.identity(ctx.f, n - t)])
    u = ctx.det_exponent(X) % d
    Xc = X * mat_pow(C, j - u)
    notes = {"t": t, "y": y, "r": r, "a": a, "b": b, "u": u}
    return (ctx.word(0, 0, A), ctx.word(s, eps, Xc)), "pgammal", notes


def threegen_words(ctx, s: int, M: int):
    """The two candidate triples (A, phi^s X_phi, gamma X_gamma) and the primed variant."""
    n, d = ctx.n, ctx.om.d
    p = ctx.om.p
    y = find_odd_y(n, d, M)
    r = (p ** s - 1) // 2
    f = ctx.f
    A = block_diag([ctx.A(2, y), ctx.A(n - 2, d // 2 - y)])
    Xphi = block_diag([ctx.X(2, y * r), ctx.X(n - 2, y * r)])
    Xgam = block_diag([ctx.X(2, -y), ctx.X(n - 2, -y)])
    Cphi = block_diag([mat_pow(ctx.A(2, y), -r), Mat.identity(f, n - 2)])
    Cgam = block_diag([ctx.A(2, y), Mat.identity(f, n - 2)])
    plain = (ctx.word(0, 0, A), ctx.word(s, 0, Xphi), ctx.word(0, 1, Xgam))
    primed = (ctx.word(0, 0, A), ctx.word(s, 0, Xphi * Cphi), ctx.word(0, 1, Xgam * Cgam))
    return plain, primed, y


def search_delta_conjugation(ctx, words, T: AbelianT, limit: Optional[int] = None):
    """Least e >= 0 such that conjugating by delta^e's representative gives rho-image T."""
    om = ctx.om
    limit = om.d if limit is None else limit
    for e in range(limit):
        y = om.delta(e)
        ws = conjugate_supplement(ctx, words, y) if e else tuple(words)
        if rho_subgroup(ctx, ws) == T.elements:
            return e, ws
    return None, None


def psl_supplement(om: OutModel, T: AbelianT) -> Supplement:
    """Dispatch to the construction that fits the shape of T."""
    if om.family != "psl":
        raise ConstructionError("psl_supplement needs a psl model")
    if not om.is_abelian(T.elements):
        raise ConstructionError("T is not abelian")
    ctx = LinearContext(om)
    if om.is_cyclic(T.elements):
        return cyclic_lift(ctx, T)
    if om.n == 2:
        if T.elements == frozenset(om.elements):
            return psl2_supplement(om, T)
        return restrict_supplement(ctx, psl2_supplement(om), T)
    if not T.maximal:
        return restrict_supplement(ctx, psl_supplement(om, containing_maximal(om, T)), T)
    split = split_cyclic_top(om, T)
    if split is not None:
        k, x = split
        s, eps, j = x[0], x[1], x[2]
        words, branch, notes = pgammal_words(ctx, k, s, eps, j, om.q - 1)
        return Supplement(words, T, ctx.center, branch, notes)
    # pi(T) = <phi^s, gamma>
    s = min((x[0] for x in T.elements if x[0]), default=0)
    s = gcd(s, om.forder) if s else om.forder
    s %= om.forder
    if om.d % 2 == 1:
        base = (ctx.word(s, 0, ctx.identity()), ctx.word(0, 1, ctx.identity()))
        e, ws = search_delta_conjugation(ctx, base, T)
        if ws is None:
            raise ConstructionError("no delta-conjugate of <phi^s, gamma> equals T")
        return Supplement(ws, T, ctx.center, "graph-field-conjugate", {"s": s, "e": e})
    plain, primed, y = threegen_words(ctx, s, om.q - 1)
    u = ctx.det_exponent(plain[2].X) % om.d
    k = next(x[2] for x in sorted(T.elements) if x[0] == 0 and x[1] == 1)
    chosen, label = (plain, "plain") if (u - k) % 2 == 0 else (primed, "primed")
    # conjugating by delta^e moves gamma delta^u to gamma delta^(u+2e)
    e, ws = search_delta_conjugation(ctx, chosen, T)
    if ws is None:
        raise ConstructionError("3gen: no conjugating delta-power found")
    return Supplement(ws, T, ctx.center, "3gen", {"s": s, "y": y, "u": u, "k": k, "variant": label, "e": e})
