"""Supplements for PSU_n(q), working inside GU_n(q) over GF(q^2).

The Hermitian form is the identity Gram matrix.  The working ``omega`` is
``nu^(q-1)`` for the primitive element ``nu`` of GF(q^2), so it has order q+1 and
every monomial matrix with entries in <omega> is unitary.
"""

from __future__ import annotations

from .field import make_field
from .linear import (
    ConstructionError,
    LinearContext,
    Supplement,
    build_A,
    build_X,
    containing_maximal,
    cyclic_lift,
    pgammal_words,
    restrict_supplement,
    split_cyclic_top,
)
from .outgroup import AbelianT, OutModel
from .semimat import NO_GRAPH, CenterSpec, Mat, MatrixError, SemilinearWord, apply_word, mat_frob, mat_mul, scale, transpose


class UnitaryContext(LinearContext):
    kind = "unitary"

    def __init__(self, om: OutModel):
        if om.family != "psu":
            raise ConstructionError("unitary context needs a psu model")
        self.om = om
        self.n = om.n
        self.q = om.q
        self.f = make_field(om.p, 2 * om.m)
        self.nu = self.f.omega
        self.step = om.q - 1
        self.omega = self.f.w(self.step)
        self.graph = NO_GRAPH
        self.forder = 2 * om.m
        self.center = CenterSpec(om.q + 1)
        self.dmod = om.q + 1

    def check_word(self, w: SemilinearWord) -> None:
        if not is_unitary(self, w.X):
            raise MatrixError("matrix part is not unitary")


def unitary_context(q: int, n: int = 3) -> UnitaryContext:
    from .outgroup import out_model

    return UnitaryContext(out_model("psu", n, q))


def is_unitary(ctx: UnitaryContext, X: Mat) -> bool:
    """True iff (X^[q])^T X = I."""
    bar = mat_frob(X, ctx.f.m // 2)
    return mat_mul(transpose(bar), X) == Mat.identity(X.f, X.n)


def ublock_scalar(ctx: UnitaryContext, w: int, l: int, c: int, s: int) -> int:
    """omega^c after checking A_{w,l}^(phi^s X_{w,c}) = omega^c A_{w,l}."""
    q, p = ctx.q, ctx.f.p
    if (c * w - l * (p ** s - 1)) % (q + 1):
        raise ConstructionError(f"congruence {c}*{w} = {l}(p^{s}-1) mod {q + 1} fails")
    A = build_A(ctx.f, w, l, ctx.step)
    X = build_X(ctx.f, w, c, ctx.step)
    word = SemilinearWord(s, 0, X, NO_GRAPH, ctx.forder)
    lam = ctx.f.w(c * ctx.step)
    if apply_word(word, A) != scale(A, lam):
        raise ConstructionError("internal: unitary block identity failed")
    return lam


def psu_supplement(om: OutModel, T: AbelianT) -> Supplement:
    if om.family != "psu":
        raise ConstructionError("psu_supplement needs a psu model")
    if not om.is_abelian(T.elements):
        raise ConstructionError("T is not abelian")
    ctx = UnitaryContext(om)
    if om.is_cyclic(T.elements):
        return cyclic_lift(ctx, T)
    if not T.maximal:
        return restrict_supplement(ctx, psu_supplement(om, containing_maximal(om, T)), T)
    split = split_cyclic_top(om, T)
    if split is None:
        raise ConstructionError("psu: the field part of T should be cyclic")
    k, x = split
    words, branch, notes = pgammal_words(ctx, k, x[0], 0, x[2], om.q + 1)
    return Supplement(words, T, ctx.center, "psu-" + branch, notes)
