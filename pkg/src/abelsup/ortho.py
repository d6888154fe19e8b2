"""Orthogonal similitudes of the split form K_n and the D_n supplements.

The space is ``k^(2n)`` with basis ``(e_1..e_n, f_1..f_n)`` and Gram matrix
``K_n = [[0, I], [I, 0]]``.  Words use the graph map ``X -> tau_n X tau_n``.

Outer classes are read off from two invariants of a similitude ``X`` of the
identity component: the square class of its ratio ``eta(X)`` and the spinor
norm of the isometry ``o_eta^-1 X``.  The spinor norm is computed as the
discriminant of the Wall form on the image of ``1 - g``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

from .field import FieldSpec, dlog, field_of_order
from .lattice import QCharacter, c_basis, char_eval, d4_case4_characters, root_system
from .linear import (
    ConstructionError,
    Supplement,
    conjugate_supplement,
    containing_maximal,
    cyclic_lift,
    restrict_supplement,
)
from .outgroup import AbelianT, Elt, OutModel, make_T
from .semimat import (
    CenterSpec,
    GraphMap,
    Mat,
    MatrixError,
    SemilinearWord,
    det,
    inverse,
    mat_frob,
    mat_mul,
    mat_pow,
    mat_prod,
    projective_scalar,
    row_basis,
    scale,
    transpose,
)


# ---------------------------------------------------------------------------
# the ambient similitude group

class SimilitudeContext:
    """K_n, tau_n and w0 for half-dimension n over f."""

    def __init__(self, n: int, f: FieldSpec):
        if n < 1:
            raise ConstructionError("half-dimension must be positive")
        self.n = n
        self.f = f
        N = 2 * n
        self.K = Mat(f, [[1 if (j == i + n or i == j + n) else 0 for j in range(N)] for i in range(N)])
        self.tau = _swap(f, N, [(n - 1, 2 * n - 1)])
        self.w0 = _swap(f, N, [(i, i + n) for i in range(n - 1)])
        self.graph = GraphMap("conj-tau", self.tau)

    def o(self, mu: int) -> Mat:
        """o_mu = diag(I_n, mu I_n)."""
        return Mat.diag(self.f, [1] * self.n + [mu] * self.n)

    def embed(self, X: Mat, idx: Sequence[int], Y: Optional[Mat] = None) -> Mat:
        """Place X on the coordinates idx of Y (default identity)."""
        rows = [list(r) for r in (Y or Mat.identity(self.f, 2 * self.n)).rows]
        for a, i in enumerate(idx):
            for b, j in enumerate(idx):
                rows[i][j] = X.rows[a][b]
        return Mat(self.f, rows)


def _swap(f: FieldSpec, N: int, pairs) -> Mat:
    perm = list(range(N))
    for a, b in pairs:
        perm[a], perm[b] = b, a
    return Mat(f, [[1 if perm[i] == j else 0 for j in range(N)] for i in range(N)])


def eta(ctx: SimilitudeContext, X: Mat) -> int:
    """The ratio mu with tX K X = mu K."""
    lhs = mat_prod(transpose(X), ctx.K, X)
    mu = projective_scalar(lhs, ctx.K)
    if mu is None:
        raise MatrixError("not an orthogonal similitude")
    return mu


def is_similitude(ctx: SimilitudeContext, X: Mat) -> bool:
    try:
        eta(ctx, X)
        return True
    except MatrixError:
        return False


def in_identity_component(ctx: SimilitudeContext, X: Mat) -> bool:
    """det X = eta(X)^n."""
    return det(X) == ctx.f.pow(eta(ctx, X), ctx.n)


def spinor_square_class(ctx: SimilitudeContext, g: Mat) -> int:
    """0 if the spinor norm of the isometry g is a square, else 1.

    Wall form: on W = im(1-g) put chi(u, v) = B(x, v) for u = (1-g)x.  With
    u_j = (1-g)e_j for a column basis J the Gram matrix is (K(1-g))[J, J].
    """
    f = ctx.f
    N = 2 * ctx.n
    one_minus = Mat(f, [[f.sub(1 if i == j else 0, g.rows[i][j]) for j in range(N)] for i in range(N)])
    J = row_basis(transpose(one_minus))
    if not J:
        return 0
    KM = mat_mul(ctx.K, one_minus)
    G = Mat(f, [[KM.rows[a][b] for b in J] for a in J])
    disc = det(G)
    if disc == 0:
        raise MatrixError("degenerate Wall form: g is not an isometry")
    return 0 if f.is_square(disc) else 1


def outer_invariants(ctx: SimilitudeContext, X: Mat) -> tuple[int, int]:
    """(dlog eta(X), spinor class of o_eta^-1 X)."""
    mu = eta(ctx, X)
    if det(X) != ctx.f.pow(mu, ctx.n):
        raise MatrixError("similitude outside the identity component")
    g = mat_mul(inverse(ctx.o(mu)), X)
    return dlog(ctx.f, mu), spinor_square_class(ctx, g)


# ---------------------------------------------------------------------------
# the exterior square GL_4 -> CO_6

_WEDGE_BASIS = ((0, 1), (0, 2), (1, 2), (2, 3), (3, 1), (0, 3))


def _wedge_coords(i: int, j: int):
    """(index, sign) of v_i ^ v_j in the basis (v12, v13, v23, v34, v42, v14)."""
    for k, (a, b) in enumerate(_WEDGE_BASIS):
        if (a, b) == (i, j):
            return k, 1
        if (b, a) == (i, j):
            return k, -1
    return None, 0


def sigma_ext_sq(X: Mat) -> Mat:
    """Matrix of the exterior square of X in the basis (v12, v13, v23, v34, v42, v14)."""
    if X.n != 4:
        raise MatrixError("sigma needs a 4x4 matrix")
    f = X.f
    if det(X) == 0:
        raise MatrixError("singular matrix")
    cols = []
    for (a, b) in _WEDGE_BASIS:
        col = [0] * 6
        for i in range(4):
            for j in range(i + 1, 4):
                c = f.sub(f.mul(X.rows[i][a], X.rows[j][b]), f.mul(X.rows[j][a], X.rows[i][b]))
                if c:
                    k, sgn = _wedge_coords(i, j)
                    col[k] = f.add(col[k], c if sgn > 0 else f.neg(c))
        cols.append(col)
    return Mat(f, [[cols[j][i] for j in range(6)] for i in range(6)])


# ---------------------------------------------------------------------------
# building blocks in CO_4

def _half(f: FieldSpec) -> int:
    if f.p == 2:
        raise ConstructionError("the orthogonal blocks need p odd")
    return (f.p - 1) // 2


def a_of(A: Mat) -> Mat:
    """a(A) = diag(A, tA^-1) diag(I, det A I)."""
    f = A.f
    d = det(A)
    It = transpose(inverse(A))
    rows = [[0] * 4 for _ in range(4)]
    for i in range(2):
        for j in range(2):
            rows[i][j] = A.rows[i][j]
            rows[2 + i][2 + j] = f.mul(It.rows[i][j], d)
    return Mat(f, rows)


def a_block(f: FieldSpec, mu: int) -> Mat:
    _half(f)
    return a_of(Mat(f, [[0, f.neg(mu)], [1, 0]]))


def b_block(f: FieldSpec, mu: int, nu: int) -> Mat:
    h = _half(f)
    t = f.pow(mu, h)
    return Mat.diag(f, [t, 1, f.mul(f.inv(t), nu), nu])


@dataclass(frozen=True)
class D2Blocks:
    n1: Mat
    n2: Mat
    h1: Mat
    x1: Mat
    x2: Mat
    x3: Mat
    y: Mat


def h_block(f: FieldSpec, mu: int) -> Mat:
    return Mat.diag(f, [1, mu, mu, 1])


def d2_blocks(f: FieldSpec, lam: Optional[int] = None) -> D2Blocks:
    h = _half(f)
    lam = f.omega if lam is None else lam
    ctx = SimilitudeContext(2, f)
    m1 = f.neg(1)
    n1 = Mat(f, [[0, 1, 0, 0], [m1, 0, 0, 0], [0, 0, 0, 1], [0, 0, m1, 0]])
    n2 = mat_prod(ctx.tau, n1, ctx.tau)
    h1 = h_block(f, lam)
    x1 = mat_mul(n1, h1)
    x2 = mat_prod(ctx.tau, x1, ctx.tau)
    x3 = mat_mul(x1, x2)
    g = f.pow(lam, h)
    y = Mat.diag(f, [f.pow(lam, f.p - 1), g, 1, g])
    return D2Blocks(n1, n2, h1, x1, x2, x3, y)


# ---------------------------------------------------------------------------
# contexts used by the certificate machinery

class OrthoContext:
    """CO_2n(q)° with the graph map conj-by-tau_n and the outer class map."""

    kind = "orthogonal"

    def __init__(self, om: OutModel):
        if om.family not in ("dn_odd", "dn_even"):
            raise ConstructionError("orthogonal context needs a D_n model")
        self.om = om
        self.f = field_of_order(om.q)
        if self.f.p == 2:
            raise ConstructionError("orthogonal matrix models need q odd")
        self.n = om.n
        self.sc = SimilitudeContext(om.n, self.f)
        self.graph = self.sc.graph
        self.forder = om.forder
        self.center = CenterSpec()
        self.lam = self.f.omega

    def word(self, s: int, eps: int, X: Mat) -> SemilinearWord:
        return SemilinearWord(s, eps, X, self.graph, self.forder)

    def identity(self) -> Mat:
        return Mat.identity(self.f, 2 * self.n)

    def check_word(self, w: SemilinearWord) -> None:
        if not in_identity_component(self.sc, w.X):
            raise MatrixError("matrix part is not in CO°")

    # -- classes -------------------------------------------------------------
    @cached_property
    def _klein(self):
        """Invariant pairs of the calibration elements for delta_1 and delta_2."""
        d1, d2 = self.delta_reps()
        return outer_invariants(self.sc, d1), outer_invariants(self.sc, d2)

    def delta_reps(self) -> tuple[Mat, Mat]:
        """Torus elements with characters psi_1 and psi_1 o tau (n even)."""
        f, n = self.f, self.n
        li = f.inv(self.lam)
        D1 = Mat.diag(f, [1] * (n - 1) + [li] + [li] * (n - 1) + [1])
        return D1, mat_prod(self.sc.tau, D1, self.sc.tau)

    def diag_class(self, X: Mat) -> tuple:
        om = self.om
        if om.d == 1:
            return ()
        e, s = outer_invariants(self.sc, X)
        if om.family == "dn_odd":
            return ((e + 2 * s) % om.d,)
        if om.d == 2:
            return (e % 2,)
        v = (e % 2, s)
        (a1, b1), (a2, b2) = self._klein
        a1, a2 = a1 % 2, a2 % 2
        for x in range(2):
            for y in range(2):
                if ((x * a1 + y * a2) % 2, (x * b1 + y * b2) % 2) == v:
                    return (x, y)
        raise MatrixError("calibration does not span the diagonal classes")

    def rho(self, w: SemilinearWord) -> Elt:
        self.check_word(w)
        return self.om.elt(w.s, w.eps, self.diag_class(w.X))

    def delta_matrix(self, v: Sequence[int]) -> Mat:
        out = self.identity()
        if not v:
            return out
        if self.om.family == "dn_odd":
            return self.sc.o(self.f.pow(self.lam, v[0]))
        d1, d2 = self.delta_reps()
        if len(v) == 1:
            return d1 if v[0] % 2 else out
        if v[0] % 2:
            out = mat_mul(out, d1)
        if v[1] % 2:
            out = mat_mul(out, d2)
        return out

    def lift(self, x: Elt) -> SemilinearWord:
        if x[1] not in (0, 1):
            raise ConstructionError("triality has no matrix lift")
        return self.word(x[0], x[1], self.delta_matrix(x[2:]))


# ---------------------------------------------------------------------------
# D_n, n odd

def _assemble(sc: SimilitudeContext, block4: Mat, last: Mat) -> Mat:
    """block4 on each U_i = <e_2i-1, e_2i, f_2i-1, f_2i>, last on the remaining coordinates."""
    n = sc.n
    Y = Mat.identity(sc.f, 2 * n)
    k = (n - last.n // 2) // 2
    for i in range(k):
        a = 2 * i
        Y = sc.embed(block4, [a, a + 1, n + a, n + a + 1], Y)
    h = last.n // 2
    idx = list(range(n - h, n)) + list(range(2 * n - h, 2 * n))
    return sc.embed(last, idx, Y)


def _diag_pows(f, lam, exps):
    return Mat.diag(f, [f.pow(lam, e) for e in exps])


def d3_sources(f: FieldSpec, case: str):
    """The GL_4 matrices (L, M, N) of the matching PSL_4 construction."""
    p, lam = f.p, f.omega
    P = lambda e: f.pow(lam, e)
    h = (p - 1) // 2
    mlam = f.neg(lam)
    L4 = Mat(f, [[0, 0, 0, mlam], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]])
    L22 = Mat(f, [[0, mlam, 0, 0], [1, 0, 0, 0], [0, 0, 0, mlam], [0, 0, 1, 0]])
    if case == "d_phi":
        k = (p - 1) // 4
        return L4, _diag_pows(f, lam, [3 * k, 2 * k, k, 0]), None
    if case == "d_phitau":
        k = (-p - 1) // 4
        return L4, _diag_pows(f, lam, [3 * k, 2 * k, k, 0]), None
    if case == "d2_phi_tau":
        return L22, _diag_pows(f, lam, [h, 0, h, 0]), _diag_pows(f, lam, [-1, 0, -1, 0])
    if case == "d2_phi_taud":
        C = Mat(f, [[0, mlam, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
        M = mat_mul(_diag_pows(f, lam, [h, 0, h, 0]), mat_pow(C, (1 - p) // 2))
        N = Mat(f, [[0, f.neg(1), 0, 0], [1, 0, 0, 0], [0, 0, P(-1), 0], [0, 0, 0, 1]])
        return L22, M, N
    raise ConstructionError(f"unknown D_n odd case {case}")


def dn_odd_case(om: OutModel, T: AbelianT) -> Optional[str]:
    """Name of the construction whose target is exactly T, or None."""
    if om.d != 4:
        return None
    p = om.p
    names = {
        1: {"d_phi": "d,f", "d2_phi_tau": "d^2,f,t", "d2_phi_taud": "d^2,f,t*d"},
        3: {"d_phitau": "d,f*t", "d2_phi_tau": "d^2,f,t", "d2_phi_taud": "d^2,f*d,t*d"},
    }[p % 4]
    for case, text in names.items():
        if om.subgroup(om.parse(text)) == T.elements:
            return case
    return None


def dn_odd_words(ctx: OrthoContext, case: str):
    f, sc, lam = ctx.f, ctx.sc, ctx.lam
    p = f.p
    P = lambda e: f.pow(lam, e)
    sc6 = SimilitudeContext(3, f)
    L, M, N = d3_sources(f, case)
    ell = sigma_ext_sq(L)
    if case == "d_phi":
        m = sigma_ext_sq(M)
        a, b = a_block(f, lam), b_block(f, lam, P(3 * (p - 1) // 2))
        A1, B1 = _assemble(sc, a, ell), _assemble(sc, b, m)
        return (ctx.word(0, 0, A1), ctx.word(1, 0, B1)), {"A1": A1, "B1": B1}
    if case == "d_phitau":
        m = mat_mul(sc6.w0, sigma_ext_sq(M))
        a, b = a_block(f, lam), b_block(f, lam, P(-3 * (p + 1) // 2))
        A1, B1 = _assemble(sc, a, ell), _assemble(sc, b, m)
        return (ctx.word(0, 0, A1), ctx.word(1, 1, B1)), {"A1": A1, "B1": B1}
    m = sigma_ext_sq(M)
    nn = mat_mul(sc6.w0, sigma_ext_sq(N))
    if case == "d2_phi_tau":
        a = a_block(f, P(2))
        b = b_block(f, P(2), P(p - 1))
        c = inverse(a)
    else:
        c = a_block(f, P(-1))
        b = b_block(f, P(-1), P((p - 1) // 2))
        a = mat_pow(c, -2)
    A1, B1, C1 = _assemble(sc, a, ell), _assemble(sc, b, m), _assemble(sc, c, nn)
    words = (ctx.word(0, 0, A1), ctx.word(1, 0, B1), ctx.word(0, 1, C1))
    return words, {"A1": A1, "B1": B1, "C1": C1}


# ---------------------------------------------------------------------------
# D_n, n even

def dn_even_matrices(ctx: OrthoContext) -> dict:
    """A_1, A_2, A_3, B and the blocks, for n even."""
    f, sc, lam = ctx.f, ctx.sc, ctx.lam
    p = f.p
    blk = d2_blocks(f, lam)
    g = f.pow(lam, (p - 1) // 2)
    a = blk.x1
    b = Mat.diag(f, [g, 1, g, f.pow(lam, p - 1)])
    A1 = _assemble(sc, a, blk.x1)
    B = _assemble(sc, b, blk.y)
    A2 = mat_prod(sc.tau, A1, sc.tau)
    A3 = mat_mul(A1, A2)
    return {"A1": A1, "A2": A2, "A3": A3, "B": B, "a": a, "b": b, "blocks": blk}


def dn_even_case(om: OutModel, T: AbelianT) -> Optional[str]:
    if om.d != 4 or om.m % 2:
        return None
    cases = {"case1": "d1,d2,f", "case2": "d3,f,t", "case3": "f,t*d1"}
    if om.n == 4:
        cases["case4"] = "f,r*d2"
    for case, text in cases.items():
        if om.subgroup(om.parse(text)) == T.elements:
            return case
    return None


def dn_even_words(ctx: OrthoContext, case: str):
    mats = dn_even_matrices(ctx)
    A1, A2, A3, B = mats["A1"], mats["A2"], mats["A3"], mats["B"]
    if case == "case1":
        words = (ctx.word(0, 0, A1), ctx.word(0, 0, A2), ctx.word(1, 0, B))
    elif case == "case2":
        words = (ctx.word(0, 0, A3), ctx.word(1, 0, B), ctx.word(0, 1, ctx.identity()))
    elif case == "case3":
        words = (ctx.word(0, 1, A1), ctx.word(1, 0, B))
    else:
        raise ConstructionError(f"no matrix words for {case}")
    return words, mats


def torus_character(sc: SimilitudeContext, D: Mat) -> tuple:
    """dlog alpha_i(D) for a diagonal similitude D (type D_n)."""
    if not D.is_diagonal():
        raise MatrixError("torus character needs a diagonal matrix")
    f, n = sc.f, sc.n
    mu = eta(sc, D)
    x = D.diagonal()[:n]
    vals = [f.div(x[i], x[i + 1]) for i in range(n - 1)]
    vals.append(f.div(f.mul(x[n - 2], x[n - 1]), mu))
    return tuple(dlog(f, v) for v in vals)


def H_matrix(sc: SimilitudeContext, mu: int) -> Mat:
    """h(mu) on every U_i."""
    blk = h_block(sc.f, mu)
    return _assemble(sc, blk, blk)


@dataclass
class Case4Certificate:
    q: int
    checks: dict
    xi: QCharacter
    xi1: QCharacter
    A1: Mat
    B: Mat

    @property
    def ok(self) -> bool:
        return all(bool(v) for v in self.checks.values())


def d4_case4(ctx: OrthoContext) -> Case4Certificate:
    """Partial certificate: the CO_8 identity and the lattice checks for <phi h(xi), rho n1n3 h(xi1)>."""
    if ctx.n != 4:
        raise ConstructionError("case 4 exists only for D4")
    f, sc, lam = ctx.f, ctx.sc, ctx.lam
    p = f.p
    mats = dn_even_matrices(ctx)
    A1, B = mats["A1"], mats["B"]
    lhs = mat_prod(inverse(B), mat_frob(A1, 1), B)
    identity_ok = lhs == scale(A1, f.pow(lam, (p - 1) // 2))
    xi, xi1, verdicts = d4_case4_characters(ctx.om.q)
    H = H_matrix(sc, lam)
    n1n3 = mat_mul(A1, inverse(H))
    blk = d2_blocks(f, lam).n1
    n1n3_expected = _assemble(sc, blk, blk)
    checks = {
        "co8_identity": identity_ok,
        "xi_rho_invariant": verdicts["xi_rho_invariant"],
        "xi_extends": verdicts["xi_extends"],
        "xi1_class_delta2": verdicts["xi1_class"] == (0, 1),
        "A1_is_n1n3_H": n1n3 == n1n3_expected,
        "H_character_is_xi1": torus_character(sc, H) == xi1.exps,
        "B_character_is_xi": torus_character(sc, B) == xi.exps,
    }
    return Case4Certificate(ctx.om.q, checks, xi, xi1, A1, B)


# ---------------------------------------------------------------------------
# dispatch for the matrix routes

def _named_supplement(ctx: OrthoContext, T: AbelianT, case: str) -> Supplement:
    if ctx.om.family == "dn_odd":
        words, mats = dn_odd_words(ctx, case)
    else:
        words, mats = dn_even_words(ctx, case)
    return Supplement(words, T, ctx.center, f"{ctx.om.family}-{case}", {"case": case})


def ortho_supplement(om: OutModel, T: AbelianT) -> Supplement:
    """Matrix supplements for D_n (q odd).  Raises for triality-only situations."""
    ctx = OrthoContext(om)
    if not om.is_abelian(T.elements):
        raise ConstructionError("T is not abelian")
    finder = dn_odd_case if om.family == "dn_odd" else dn_even_case
    case = finder(om, T)
    if case == "case4":
        raise ConstructionError("case 4 has only a partial certificate")
    if case is not None:
        return _named_supplement(ctx, T, case)
    if om.is_cyclic(T.elements):
        return cyclic_lift(ctx, T)
    if not T.maximal:
        return restrict_supplement(ctx, ortho_supplement(om, containing_maximal(om, T)), T)
    base = canonical_conjugate(om, T, matrix_only=True)
    if base is None:
        raise ConstructionError("T is not conjugate to a constructed case by a liftable element")
    T0, case0, y = base
    words = conjugate_supplement(ctx, _named_supplement(ctx, T0, case0).words, y)
    return Supplement(words, T, ctx.center, f"{om.family}-{case0}+conjugation", {"case": case0, "conjugator": om.fmt(y)})


def canonical_conjugate(om: OutModel, T: AbelianT, matrix_only: bool = False):
    """(T0, case, y) with T0^y = T for a named case T0, preferring liftable y."""
    finder = dn_odd_case if om.family == "dn_odd" else dn_even_case
    if om.family == "dn_odd":
        texts = {1: ["d,f", "d^2,f,t", "d^2,f,t*d"], 3: ["d,f*t", "d^2,f,t", "d^2,f*d,t*d"]}[om.p % 4]
    else:
        texts = ["d1,d2,f", "d3,f,t", "f,t*d1"] + (["f,r*d2"] if om.n == 4 else [])
    for text in texts:
        T0 = make_T(om, om.parse(text))
        case = finder(om, T0)
        if case is None or len(T0.elements) != len(T.elements):
            continue
        for y in om.elements:
            if matrix_only and y[1] not in (0, 1):
                continue
            if frozenset(om.conj(x, y) for x in T0.elements) == T.elements:
                return T0, case, y
    return None


def h_evaluation(sc: SimilitudeContext, mu_exp: int) -> tuple[int, int]:
    """dlog c_{n-1}(H(mu)) and dlog c_n(H(mu)) for mu = lambda^mu_exp."""
    f = sc.f
    H = H_matrix(sc, f.pow(f.omega, mu_exp))
    rs = root_system("D", sc.n)
    chi = QCharacter(torus_character(sc, H), f.q - 1)
    cb = c_basis(rs)
    return char_eval(chi, cb[-2]), char_eval(chi, cb[-1])
