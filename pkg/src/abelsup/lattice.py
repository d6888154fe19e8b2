"""Root data, Coxeter elements and characters of the root lattice.

Lattice vectors are integer column vectors.  Weight coordinates refer to the
fundamental weights, root coordinates to the simple roots; the simple root
``alpha_i`` has weight coordinates given by row i of the Cartan matrix.  A
character ``chi: Q -> F^x`` is stored as the vector of discrete logs
``dlog chi(alpha_i)`` modulo ``M = |F^x|``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Optional, Sequence

import numpy as np
from sympy import Matrix, ZZ, eye
from sympy.matrices.normalforms import smith_normal_decomp

from .field import prime_power


class LatticeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# root systems

def _bourbaki_roots(typ: str, n: int) -> list[list[Fraction]]:
    half = Fraction(1, 2)
    if typ == "A":
        dim = n + 1
        out = []
        for i in range(n):
            v = [Fraction(0)] * dim
            v[i], v[i + 1] = Fraction(1), Fraction(-1)
            out.append(v)
        return out
    if typ in ("B", "C", "D"):
        out = []
        for i in range(n - 1):
            v = [Fraction(0)] * n
            v[i], v[i + 1] = Fraction(1), Fraction(-1)
            out.append(v)
        v = [Fraction(0)] * n
        if typ == "B":
            v[n - 1] = Fraction(1)
        elif typ == "C":
            v[n - 1] = Fraction(2)
        else:
            v[n - 2], v[n - 1] = Fraction(1), Fraction(1)
        out.append(v)
        return out
    if typ == "E":
        # the E8 simple roots, truncated
        roots = []
        a1 = [half] + [-half] * 6 + [half]
        roots.append(a1)
        a2 = [Fraction(0)] * 8
        a2[0] = a2[1] = Fraction(1)
        roots.append(a2)
        for i in range(2, 8):
            v = [Fraction(0)] * 8
            v[i - 1], v[i - 2] = Fraction(1), Fraction(-1)
            roots.append(v)
        return roots[:n]
    raise LatticeError(f"unsupported type {typ}")


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


@dataclass(frozen=True)
class RootSystem:
    typ: str
    n: int
    cartan: tuple  # a_ij = <alpha_i, alpha_j^vee>
    tau: Optional[tuple] = None  # graph symmetry as a permutation of range(n)
    triality: Optional[tuple] = None  # D4 only

    @property
    def name(self) -> str:
        return f"{self.typ}{self.n}"

    @property
    def A(self) -> Matrix:
        return Matrix(self.cartan)

    @property
    def delta(self) -> int:
        return int(self.A.det())

    @property
    def delta1(self) -> int:
        if self.typ == "D" and self.n % 2 == 0:
            return 2
        return self.delta


def root_system(typ: str, n: int) -> RootSystem:
    """Cartan matrix and graph symmetry with Bourbaki numbering (roots indexed from 0)."""
    typ = typ.upper()
    valid = {"A": n >= 1, "B": n >= 2, "C": n >= 2, "D": n >= 3, "E": n in (6, 7, 8)}
    if typ not in valid or not valid[typ]:
        raise LatticeError(f"unsupported root system {typ}{n}")
    roots = _bourbaki_roots(typ, n)
    cart = tuple(tuple(int(2 * _dot(roots[i], roots[j]) / _dot(roots[j], roots[j])) for j in range(n))
                 for i in range(n))
    tau = None
    tri = None
    if typ == "A" and n >= 2:
        tau = tuple(n - 1 - i for i in range(n))
    elif typ == "D":
        tau = tuple(list(range(n - 2)) + [n - 1, n - 2])
        if n == 4:
            # a -> b means the character chi o rho takes at a the value chi had at b
            tri = (3, 1, 0, 2)
    elif typ == "E" and n == 6:
        tau = (5, 1, 4, 3, 2, 0)
    return RootSystem(typ, n, cart, tau, tri)


# ---------------------------------------------------------------------------
# Weyl group elements on weight coordinates

def reflection_matrix(rs: RootSystem, i: int) -> Matrix:
    """s_i on weight coordinates: s_i(w_j) = w_j - delta_ij alpha_i."""
    S = eye(rs.n)
    for k in range(rs.n):
        S[k, i] -= rs.cartan[i][k]
    return S


def coxeter_map(rs: RootSystem, order: Sequence[int]) -> Matrix:
    """w = s_{order[0]} ... s_{order[-1]} on weight coordinates (0-based indices)."""
    if sorted(order) != list(range(rs.n)):
        raise LatticeError("order must be a permutation of the simple reflections")
    W = eye(rs.n)
    for i in order:
        W = W * reflection_matrix(rs, i)
    return W


def to_root_coords(rs: RootSystem, F_weight: Matrix) -> Matrix:
    At = rs.A.T
    return At.inv() * F_weight * At


def lemma_coxeter_verify(rs: RootSystem, order: Sequence[int]) -> bool:
    """(1-w) w_{o_k} = alpha_{o_k} + integer combination of alpha_{o_j}, j < k."""
    W = coxeter_map(rs, order)
    img = rs.A.T.inv() * (eye(rs.n) - W)  # columns: (1-w) omega_i in root coordinates
    for k, i in enumerate(order):
        col = img[:, i]
        if any(not x.is_integer for x in col):
            return False
        if col[i] != 1:
            return False
        later = set(order[k + 1:])
        if any(col[j] != 0 for j in later):
            return False
    return True


def one_minus_w_root(rs: RootSystem, order: Sequence[int]) -> Matrix:
    return to_root_coords(rs, eye(rs.n) - coxeter_map(rs, order))


def inv_one_minus_w(rs: RootSystem, order: Sequence[int], delta1: Optional[int] = None) -> Matrix:
    """Delta_1 (1-w)^-1 as an integer endomorphism of Q in root coordinates."""
    d1 = rs.delta1 if delta1 is None else delta1
    F = d1 * one_minus_w_root(rs, order).inv()
    if any(not x.is_integer for x in F):
        raise LatticeError(f"Delta_1 (1-w)^-1 is not integral with Delta_1 = {d1}")
    return F


def perm_matrix(perm: Sequence[int]) -> Matrix:
    """Root-coordinate matrix of the lattice map alpha_j -> alpha_{perm[j]}."""
    n = len(perm)
    P = Matrix.zeros(n, n)
    for j, i in enumerate(perm):
        P[i, j] = 1
    return P


# ---------------------------------------------------------------------------
# characters

@dataclass(frozen=True)
class QCharacter:
    exps: tuple
    M: int

    def __post_init__(self):
        object.__setattr__(self, "exps", tuple(int(e) % self.M for e in self.exps))

    def __add__(self, other: "QCharacter") -> "QCharacter":
        self._same(other)
        return QCharacter(tuple(a + b for a, b in zip(self.exps, other.exps)), self.M)

    def __sub__(self, other: "QCharacter") -> "QCharacter":
        self._same(other)
        return QCharacter(tuple(a - b for a, b in zip(self.exps, other.exps)), self.M)

    def __neg__(self):
        return QCharacter(tuple(-a for a in self.exps), self.M)

    def scale(self, k: int) -> "QCharacter":
        return QCharacter(tuple(k * a for a in self.exps), self.M)

    def is_trivial(self) -> bool:
        return not any(self.exps)

    def _same(self, other):
        if self.M != other.M or len(self.exps) != len(other.exps):
            raise LatticeError("characters with different moduli or ranks")


def zero_character(rs: RootSystem, M: int) -> QCharacter:
    return QCharacter((0,) * rs.n, M)


def char_compose(chi: QCharacter, F: Matrix) -> QCharacter:
    """chi o f for f given in root coordinates: exponents F^T e."""
    if any(not x.is_integer for x in F):
        raise LatticeError("lattice map is not integral on Q")
    n = len(chi.exps)
    e = chi.exps
    return QCharacter(tuple(sum(int(F[i, j]) * e[i] for i in range(n)) for j in range(n)), chi.M)


def char_permute(chi: QCharacter, perm: Sequence[int]) -> QCharacter:
    """chi o pi, where pi maps alpha_j to alpha_{perm[j]}."""
    return QCharacter(tuple(chi.exps[perm[j]] for j in range(len(perm))), chi.M)


# -- solvability of linear congruences ------------------------------------

@dataclass(frozen=True)
class CongruenceSystem:
    """Data to decide whether C x = b (mod M) has a solution."""

    S: tuple   # left transform, rows
    diag: tuple
    M: int

    def solvable(self, b: Sequence[int]) -> bool:
        for i, row in enumerate(self.S):
            v = sum(int(s) * int(x) for s, x in zip(row, b))
            di = self.diag[i] if i < len(self.diag) else 0
            if v % gcd(di, self.M):
                return False
        return True

    def solvable_batch(self, B: np.ndarray) -> np.ndarray:
        """B has shape (..., k); returns a boolean array of shape (...)."""
        ok = np.ones(B.shape[:-1], dtype=bool)
        for i, row in enumerate(self.S):
            di = self.diag[i] if i < len(self.diag) else 0
            g = gcd(di, self.M)
            if g == 1:
                continue
            v = np.zeros(B.shape[:-1], dtype=np.int64)
            for s, col in zip(row, np.moveaxis(B, -1, 0)):
                if s:
                    v += (int(s) % g) * col
            ok &= (v % g) == 0
        return ok


def congruence_system(C: Matrix, M: int) -> CongruenceSystem:
    D, S, _T = smith_normal_decomp(C, domain=ZZ)
    k = min(D.shape)
    diag = tuple(int(D[i, i]) for i in range(k))
    return CongruenceSystem(tuple(tuple(int(x) for x in S.row(i)) for i in range(S.rows)), diag, M)


@lru_cache(maxsize=None)
def _extension_system(rs: RootSystem, M: int, twisted_q: Optional[int]) -> CongruenceSystem:
    A = rs.A
    if twisted_q is None:
        return congruence_system(A, M)
    if rs.tau is None:
        raise LatticeError("self-conjugate extension needs a graph symmetry")
    # x_{tau(i)} = q x_i for the weight exponents x
    n = rs.n
    R = Matrix.zeros(n, n)
    for i in range(n):
        R[i, rs.tau[i]] += 1
        R[i, i] -= twisted_q
    return congruence_system(A.col_join(R), M)


def extends_to_P(rs: RootSystem, chi: QCharacter) -> bool:
    """Whether chi extends from Q to P (solve A x = e mod M)."""
    return _extension_system(rs, chi.M, None).solvable(chi.exps)


def extends_to_P_batch(rs: RootSystem, M: int, E: np.ndarray) -> np.ndarray:
    """Vectorized extends_to_P over exponent vectors in the last axis of E."""
    return _extension_system(rs, M, None).solvable_batch(E)


def self_conjugate(rs: RootSystem, chi: QCharacter, q: int) -> bool:
    """chi(tau x) = chi(x)^q for all x in Q."""
    if rs.tau is None:
        raise LatticeError(f"{rs.name} has no graph symmetry")
    return all((chi.exps[rs.tau[i]] - q * chi.exps[i]) % chi.M == 0 for i in range(rs.n))


def extends_self_conjugately(rs: RootSystem, chi: QCharacter, q: int) -> bool:
    b = list(chi.exps) + [0] * rs.n
    return _extension_system(rs, chi.M, q).solvable(b)


def brute_force_extends(rs: RootSystem, M: int) -> np.ndarray:
    """Boolean array over all exponent vectors: membership in the image of x -> A x mod M.

    Independent of the Smith form route: the image is grown from the columns of A
    by repeated shifting of an indicator array.
    """
    n = rs.n
    mask = np.zeros((M,) * n, dtype=bool)
    mask[(0,) * n] = True
    for j in range(n):
        col = tuple(rs.cartan[i][j] % M for i in range(n))
        step = col
        # closure under adding multiples of col, by doubling
        for _ in range(max(1, M.bit_length())):
            mask |= np.roll(mask, shift=step, axis=tuple(range(n)))
            step = tuple((2 * s) % M for s in step)
    return mask


# -- classes of characters modulo the extendable ones ----------------------

def least_nonextendable(rs: RootSystem, M: int, twisted_q: Optional[int] = None) -> Optional[QCharacter]:
    for e in itertools.product(range(M), repeat=rs.n):
        chi = QCharacter(e, M)
        if twisted_q is None:
            if not extends_to_P(rs, chi):
                return chi
        elif self_conjugate(rs, chi, twisted_q) and not extends_self_conjugately(rs, chi, twisted_q):
            return chi
    return None


def psi_characters(rs: RootSystem, M: int) -> tuple[QCharacter, QCharacter]:
    """psi_1: alpha_{n-1} -> lambda, others trivial; psi_2 = psi_1 o tau."""
    if rs.typ != "D" or rs.n % 2:
        raise LatticeError("psi characters are defined for D_n, n even")
    e = [0] * rs.n
    e[rs.n - 2] = 1
    psi1 = QCharacter(tuple(e), M)
    return psi1, char_permute(psi1, rs.tau)


def c_basis(rs: RootSystem) -> list[list[int]]:
    """For D_n, n even: c_i = alpha_i (i <= n-2), c_{n-1}, c_n shifted by alpha_1 + alpha_3 + ... ."""
    n = rs.n
    out = []
    for i in range(n - 2):
        v = [0] * n
        v[i] = 1
        out.append(v)
    odd = [i for i in range(0, n - 3, 2)]
    for top in (n - 2, n - 1):
        v = [0] * n
        v[top] = 1
        for i in odd:
            v[i] -= 1
        out.append(v)
    return out


def char_eval(chi: QCharacter, v: Sequence[int]) -> int:
    """dlog chi(v) for v in root coordinates."""
    return sum(a * b for a, b in zip(chi.exps, v)) % chi.M


@dataclass
class ClassMap:
    """Class of a character in Hom(Q, F^x) / (extendable characters)."""

    rs: RootSystem
    M: int
    refs: tuple
    orders: tuple
    twisted_q: Optional[int] = None

    def extendable(self, chi: QCharacter) -> bool:
        if self.twisted_q is None:
            return extends_to_P(self.rs, chi)
        return extends_self_conjugately(self.rs, chi, self.twisted_q)

    def __call__(self, chi: QCharacter) -> tuple:
        if self.twisted_q is not None and not self_conjugate(self.rs, chi, self.twisted_q):
            raise LatticeError("character is not self-conjugate")
        for ks in itertools.product(*(range(o) for o in self.orders)):
            psi = chi
            for k, r in zip(ks, self.refs):
                psi = psi - r.scale(k)
            if self.extendable(psi):
                return ks
        raise LatticeError("class not found: references do not generate the quotient")

    def representative(self, ks: Sequence[int]) -> QCharacter:
        out = zero_character(self.rs, self.M)
        for k, r in zip(ks, self.refs):
            out = out + r.scale(k)
        return out


def class_map(rs: RootSystem, M: int, d: int, twisted_q: Optional[int] = None) -> ClassMap:
    if d == 1:
        return ClassMap(rs, M, (), (), twisted_q)
    if rs.typ == "D" and rs.n % 2 == 0 and twisted_q is None:
        refs = psi_characters(rs, M)
        return ClassMap(rs, M, refs, (2, 2))
    ref = least_nonextendable(rs, M, twisted_q)
    if ref is None:
        return ClassMap(rs, M, (), (), twisted_q)
    return ClassMap(rs, M, (ref,), (d,), twisted_q)


# ---------------------------------------------------------------------------
# character-level supplements

E6_ORDER = (0, 3, 5, 2, 1, 4)  # s1 s4 s6 s3 s2 s5


@dataclass
class CharCertificateData:
    family: str
    case: str
    rs: RootSystem
    q: int
    M: int
    order: tuple
    chi: QCharacter
    chi_prime: QCharacter
    field_power: int
    graph: int
    lhs: QCharacter
    rhs: QCharacter
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.lhs == self.rhs and all(self.checks.values())


def _regime(family: str, q: int, n: Optional[int]) -> tuple:
    p, m = prime_power(q)
    if family == "bc":
        if p == 2:
            raise LatticeError("B/C/E7 construction needs p odd")
        return "bc", p
    if family == "e7":
        if p == 2:
            raise LatticeError("E7 construction needs p odd")
        return "e7", p
    if family in ("e6_case1", "e6_case2", "e6"):
        if (q - 1) % 3:
            raise LatticeError("E6 construction needs q = 1 mod 3")
        case = "e6_case1" if p % 3 == 1 else "e6_case2"
        if family != "e6" and family != case:
            raise LatticeError(f"{family} does not match p = {p} mod 3")
        return case, p
    if family == "2e6":
        if (q + 1) % 3:
            raise LatticeError("2E6 construction needs q = -1 mod 3")
        return "2e6", p
    if family == "2dn":
        if p == 2 or (n or 0) % 2:
            raise LatticeError("2Dn construction needs p odd and n even")
        return "2dn", p
    raise LatticeError(f"no character construction for {family}")


def chevalley_supplement(family: str, rs: RootSystem, q: int, chi: Optional[QCharacter] = None) -> CharCertificateData:
    """The character pair (chi, chi') with chi' o (1-w) = (1-g) chi."""
    case, p = _regime(family, q, rs.n)
    twisted = case in ("2e6", "2dn")
    M = q * q - 1 if twisted else q - 1
    tq = q if twisted else None
    if case in ("e6_case1", "e6_case2", "2e6"):
        order = E6_ORDER
    else:
        order = tuple(range(rs.n))
    if chi is None:
        chi = least_nonextendable(rs, M, tq)
        if chi is None:
            raise LatticeError("every character extends: nothing to construct")
    F1 = one_minus_w_root(rs, order)
    zeta = char_compose(chi, inv_one_minus_w(rs, order))
    fpow, graph = 1, 0
    if case in ("bc", "e7", "2dn"):
        chi_p = zeta.scale((1 - p) // 2)
        rhs = chi.scale(1 - p)
    elif case == "e6_case1":
        chi_p = zeta.scale((1 - p) // 3)
        rhs = chi.scale(1 - p)
    elif case == "e6_case2":
        Pt = perm_matrix(rs.tau)
        side = char_compose(chi, (eye(rs.n) + Pt) * F1.inv())
        chi_p = zeta.scale((1 + p) // 3) - side.scale(p)
        rhs = chi - char_permute(chi, rs.tau).scale(p)
        graph = 1
    else:  # 2e6
        chi_p = zeta.scale((1 - p * p) // 3)
        rhs = chi.scale(1 - p * p)
        fpow = 2
    lhs = char_compose(chi_p, F1)
    checks = {}
    if twisted:
        checks["chi_self_conjugate"] = self_conjugate(rs, chi, q)
        checks["chi_not_self_conjugately_extendable"] = not extends_self_conjugately(rs, chi, q)
        checks["chi_prime_self_conjugate"] = self_conjugate(rs, chi_p, q)
    else:
        checks["chi_not_extendable"] = not extends_to_P(rs, chi)
    if rs.tau is not None and case in ("e6_case1", "e6_case2", "2e6", "2dn"):
        Pt = perm_matrix(rs.tau)
        checks["w_commutes_with_tau"] = Pt * F1 == F1 * Pt
    return CharCertificateData(case, case, rs, q, M, tuple(order), chi, chi_p, fpow, graph, lhs, rhs, checks)


def d4_case4_characters(q: int) -> tuple[QCharacter, QCharacter, dict]:
    """xi (field generator) and xi_1 (triality generator) for D4."""
    p, m = prime_power(q)
    if p == 2 or m % 2:
        raise LatticeError("case 4 needs q odd and m even")
    rs = root_system("D", 4)
    M = q - 1
    h = (p - 1) // 2
    xi = QCharacter((h, 1 - p, h, h), M)
    xi1 = QCharacter((-1, 1, -1, 0), M)
    cb = c_basis(rs)
    cm = class_map(rs, M, 4)
    verdicts = {
        "xi_c3": char_eval(xi, cb[2]),
        "xi_c4": char_eval(xi, cb[3]),
        "xi1_c3": char_eval(xi1, cb[2]),
        "xi1_c4": char_eval(xi1, cb[3]),
        "xi_extends": extends_to_P(rs, xi),
        "xi1_class": cm(xi1),
        "xi_rho_invariant": char_permute(xi, rs.triality) == xi,
    }
    return xi, xi1, verdicts


# ---------------------------------------------------------------------------
# words h(chi) F at the character level
#
# A word is (f, g, chi): the graph-field automorphism phi^f g followed by the
# diagonal automorphism h(chi).  Products follow
# (F1, chi1)(F2, chi2) = (F1 F2, g_F2(chi1) + chi2), where g_F is the action of F
# on characters: g_phi(chi) = p chi, g_pi(chi) = chi o pi for graph symmetries.


@dataclass(frozen=True)
class CharWord:
    f: int
    g: int
    chi: QCharacter


def family_root_system(family: str, n: int, typ: Optional[str] = None) -> RootSystem:
    if family == "bc":
        return root_system(typ or "B", n)
    if family == "e7":
        return root_system("E", 7)
    if family in ("e6", "2e6"):
        return root_system("E", 6)
    if family in ("2dn", "dn_even", "dn_odd", "d4"):
        return root_system("D", n)
    if family == "psl":
        return root_system("A", n - 1)
    raise LatticeError(f"no root system for {family}")


class CharContext:
    """Character-level words for an OutModel with a root-system description."""

    kind = "character"

    def __init__(self, om, typ: Optional[str] = None):
        self.om = om
        self.rs = family_root_system(om.family, om.n, typ)
        self.twisted = om.family in ("2e6", "2dn")
        self.M = om.q ** 2 - 1 if self.twisted else om.q - 1
        self.p = om.p
        self.cmap = class_map(self.rs, self.M, om.d, om.q if self.twisted else None)
        self.perms = self._graph_perms()

    def _graph_perms(self):
        om, rs = self.om, self.rs
        ident = tuple(range(rs.n))
        names = om.graph_names
        perms = {0: ident}
        gens = {}
        if "t" in names or "g" in names:
            if rs.tau is None:
                raise LatticeError("graph automorphism without a diagram symmetry")
            gens[names.index("t" if "t" in names else "g")] = rs.tau
        if "r" in names:
            gens[names.index("r")] = rs.triality
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for g, pg in gens.items():
                    y = om.graph_mul[x][g]
                    comp = tuple(perms[x][pg[j]] for j in range(rs.n))
                    if y in perms:
                        if perms[y] != comp:
                            raise LatticeError("graph permutations inconsistent with the model")
                        continue
                    perms[y] = comp
                    nxt.append(y)
            frontier = nxt
        if len(perms) != len(names):
            raise LatticeError("graph part not generated")
        return perms

    # -- calculus ------------------------------------------------------------
    def act(self, chi: QCharacter, f: int, g: int) -> QCharacter:
        out = chi
        if g:
            out = char_permute(out, self.perms[g])
        return out.scale(pow(self.p, f % self.om.forder, self.M))

    def word(self, f: int, g: int, chi) -> CharWord:
        if not isinstance(chi, QCharacter):
            chi = QCharacter(tuple(chi), self.M)
        return CharWord(f % self.om.forder, g, chi)

    def identity_word(self) -> CharWord:
        return self.word(0, 0, zero_character(self.rs, self.M))

    def mul(self, u: CharWord, v: CharWord) -> CharWord:
        x = self.om.mul((u.f, u.g) + (0,) * self.om.k, (v.f, v.g) + (0,) * self.om.k)
        return CharWord(x[0], x[1], self.act(u.chi, v.f, v.g) + v.chi)

    def inv(self, u: CharWord) -> CharWord:
        x = self.om.inv((u.f, u.g) + (0,) * self.om.k)
        return CharWord(x[0], x[1], -self.act(u.chi, x[0], x[1]))

    def conj(self, u: CharWord, y: CharWord) -> CharWord:
        return self.mul(self.mul(self.inv(y), u), y)

    def comm(self, u: CharWord, v: CharWord) -> CharWord:
        return self.mul(self.mul(self.inv(u), self.inv(v)), self.mul(u, v))

    def is_identity(self, u: CharWord) -> bool:
        return u.f == 0 and u.g == 0 and u.chi.is_trivial()

    def check_word(self, u: CharWord) -> None:
        if self.twisted and not self_conjugate(self.rs, u.chi, self.om.q):
            raise LatticeError("twisted words need self-conjugate characters")

    def rho(self, u: CharWord):
        self.check_word(u)
        return self.om.elt(u.f, u.g, self.cmap(u.chi))

    def lift(self, x) -> CharWord:
        return CharWord(x[0], x[1], self.cmap.representative(x[2:]))
