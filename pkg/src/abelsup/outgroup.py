"""Finite models of Out(G0) built from the standard presentations.

An outer automorphism is stored in the normal form ``phi^f * g * delta^v`` where
``g`` lies in the graph part (trivial, <gamma>, <tau> or S3 = <rho, tau>) and ``v``
is an exponent vector for the diagonal part (cyclic <delta> or the Klein group
<delta1, delta2>).  Products are read left to right, and
``(phi^f1 g1 v1)(phi^f2 g2 v2) = phi^(f1+f2) g1 g2 (v1^(phi^f2 g2) + v2)``.

The element tuple is ``(f, g, v_1, ..., v_k)``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Iterable, Optional, Sequence

from .field import FieldError, prime_power

FAMILIES = ("psl", "psu", "bc", "e7", "e6", "2e6", "dn_odd", "dn_even", "d4", "2dn")
TWISTED = ("psu", "2e6", "2dn")
ENUMERATION_LIMIT = 5000


class OutModelError(ValueError):
    pass


Elt = tuple


def table2_d(family: str, n: int, q: int) -> int:
    """The index of G0 in Inndiag(G0) for the families handled here."""
    if family == "psl":
        return gcd(n, q - 1)
    if family == "psu":
        return gcd(n, q + 1)
    if family in ("bc", "e7"):
        return gcd(2, q - 1)
    if family == "e6":
        return gcd(3, q - 1)
    if family == "2e6":
        return gcd(3, q + 1)
    if family in ("dn_odd", "dn_even", "d4"):
        return gcd(4, q ** n - 1)
    if family == "2dn":
        return gcd(4, q ** n + 1)
    raise OutModelError(f"unknown family {family!r}")


def aut_splits(family: str, n: int, q: int) -> bool:
    """Whether Aut(G0) splits over G0, by the arithmetic criterion on (d, q, m)."""
    p, m = prime_power(q)
    d = table2_d(family, n, q)
    if family == "2dn":
        return n % 2 == 1 or p == 2
    if family in ("dn_odd", "dn_even", "d4"):
        return gcd(gcd((q ** n - 1) // d, d), m) == 1
    if family in TWISTED:
        return gcd(gcd((q + 1) // d, d), m) == 1
    return gcd(gcd((q - 1) // d, d), m) == 1


def _mat_vec(M, v, mods):
    return tuple(sum(M[i][j] * v[j] for j in range(len(v))) % mods[i] for i in range(len(v)))


def _mat_mul(A, B, mods):
    k = len(A)
    return tuple(tuple(sum(A[i][t] * B[t][j] for t in range(k)) % mods[i] for j in range(k)) for i in range(k))


def _ident(k):
    return tuple(tuple(int(i == j) for j in range(k)) for i in range(k))


@dataclass(frozen=True, eq=False)
class OutModel:
    family: str
    n: int
    q: int
    p: int
    m: int
    d: int
    nmod: tuple[int, ...]          # moduli of the diagonal coordinates
    forder: int                    # order of phi
    graph_names: tuple[str, ...]   # names of graph-part elements; index 0 is trivial
    graph_mul: tuple[tuple[int, ...], ...]
    graph_act: tuple               # per graph element, matrix acting on diagonal vectors
    phi_act: tuple                 # matrix of phi on diagonal vectors
    gen_letters: dict = field(default_factory=dict)
    graph_letter: str = "g"
    relations: tuple[str, ...] = ()

    # -- basic arithmetic --------------------------------------------------
    @property
    def k(self) -> int:
        return len(self.nmod)

    @property
    def identity(self) -> Elt:
        return (0, 0) + (0,) * self.k

    @cached_property
    def _phi_pows(self):
        out = [_ident(self.k)]
        for _ in range(self.forder - 1):
            out.append(_mat_mul(self.phi_act, out[-1], self.nmod))
        return out

    def act(self, v, f: int, g: int):
        """v^(phi^f g)."""
        if not self.k:
            return ()
        v = _mat_vec(self._phi_pows[f % self.forder], v, self.nmod)
        return _mat_vec(self.graph_act[g], v, self.nmod)

    def mul(self, x: Elt, y: Elt) -> Elt:
        f1, g1, v1 = x[0], x[1], x[2:]
        f2, g2, v2 = y[0], y[1], y[2:]
        w = self.act(v1, f2, g2)
        return ((f1 + f2) % self.forder, self.graph_mul[g1][g2]) + tuple(
            (a + b) % mm for a, b, mm in zip(w, v2, self.nmod))

    def prod(self, *xs: Elt) -> Elt:
        out = self.identity
        for x in xs:
            out = self.mul(out, x)
        return out

    @cached_property
    def _graph_inv(self):
        return tuple(next(j for j in range(len(self.graph_names)) if self.graph_mul[i][j] == 0)
                     for i in range(len(self.graph_names)))

    def inv(self, x: Elt) -> Elt:
        # x = h v with h = phi^f g, so x^-1 = v^-1 h^-1
        f, g = x[0], x[1]
        hinv = ((-f) % self.forder, self._graph_inv[g]) + (0,) * self.k
        vinv = (0, 0) + tuple((-a) % mm for a, mm in zip(x[2:], self.nmod))
        return self.mul(vinv, hinv)

    def power(self, x: Elt, e: int) -> Elt:
        if e < 0:
            x, e = self.inv(x), -e
        out = self.identity
        for _ in range(e):
            out = self.mul(out, x)
        return out

    def conj(self, x: Elt, y: Elt) -> Elt:
        """x^y = y^-1 x y."""
        return self.prod(self.inv(y), x, y)

    def comm(self, x: Elt, y: Elt) -> Elt:
        return self.prod(self.inv(x), self.inv(y), x, y)

    def order_of(self, x: Elt) -> int:
        k, y = 1, x
        while y != self.identity:
            y = self.mul(y, x)
            k += 1
        return k

    # -- element constructors ---------------------------------------------
    def elt(self, f: int = 0, g: int = 0, v: Sequence[int] = ()) -> Elt:
        v = tuple(v) + (0,) * (self.k - len(v))
        return (f % self.forder, g) + tuple(a % mm for a, mm in zip(v, self.nmod))

    def delta(self, *v: int) -> Elt:
        return self.elt(0, 0, v)

    def phi(self, s: int = 1) -> Elt:
        return self.elt(s)

    def graph(self, name: str) -> Elt:
        return self.elt(0, self.graph_names.index(name))

    def diagonal_part(self, x: Elt) -> tuple[int, ...]:
        return tuple(x[2:])

    def field_graph_part(self, x: Elt) -> Elt:
        return (x[0], x[1]) + (0,) * self.k

    # -- enumeration -------------------------------------------------------
    @cached_property
    def elements(self) -> tuple[Elt, ...]:
        size = self.forder * len(self.graph_names)
        for mm in self.nmod:
            size *= mm
        if size > ENUMERATION_LIMIT:
            raise OutModelError(f"|Out| = {size} exceeds the enumeration limit")
        ranges = [range(self.forder), range(len(self.graph_names))] + [range(mm) for mm in self.nmod]
        return tuple(itertools.product(*ranges))

    @property
    def order(self) -> int:
        return len(self.elements)

    def subgroup(self, gens: Iterable[Elt]) -> frozenset:
        gens = [tuple(g) for g in gens]
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    def is_abelian(self, elts: Iterable[Elt]) -> bool:
        es = list(elts)
        return all(self.mul(a, b) == self.mul(b, a) for i, a in enumerate(es) for b in es[i + 1:])

    def centralizer(self, elts: Iterable[Elt]) -> frozenset:
        es = list(elts)
        return frozenset(x for x in self.elements if all(self.mul(x, a) == self.mul(a, x) for a in es))

    def abelian_subgroups(self) -> list[frozenset]:
        """Every abelian subgroup, by growing from the trivial one."""
        start = frozenset([self.identity])
        seen = {start}
        stack = [start]
        while stack:
            A = stack.pop()
            for x in sorted(self.centralizer(A) - A):
                B = self.subgroup(list(A) + [x])
                if B not in seen:
                    seen.add(B)
                    stack.append(B)
        return sorted(seen, key=lambda s: (len(s), sorted(s)))

    def is_maximal_abelian(self, A: frozenset) -> bool:
        return self.is_abelian(A) and self.centralizer(A) == A

    def generators_of(self, A: Iterable[Elt]) -> list[Elt]:
        """A small generating set, chosen deterministically."""
        elts = sorted(A, key=self._nice_key)
        gens: list[Elt] = []
        span = frozenset([self.identity])
        target = frozenset(A)
        while span != target:
            # pick the element whose addition grows the span most; ties by niceness
            best = max((x for x in elts if x not in span),
                       key=lambda x: (len(self.subgroup(gens + [x])), [-t for t in self._nice_key(x)]))
            gens.append(best)
            span = self.subgroup(gens)
        return gens

    def _nice_key(self, x: Elt):
        return (sum(1 for t in x if t), x[1], x[0]) + tuple(x[2:])

    def is_cyclic(self, A: Iterable[Elt]) -> bool:
        A = frozenset(A)
        return any(self.order_of(x) == len(A) for x in A)

    # -- printing and parsing ---------------------------------------------
    def fmt(self, x: Elt) -> str:
        parts = []
        f, g = x[0], x[1]
        if f:
            parts.append("f" if f == 1 else f"f^{f}")
        if g:
            parts.append(self.graph_names[g])
        v = x[2:]
        if self.k == 1 and v[0]:
            parts.append("d" if v[0] == 1 else f"d^{v[0]}")
        elif self.k == 2 and any(v):
            parts.append({(1, 0): "d1", (0, 1): "d2", (1, 1): "d3"}[tuple(v)])
        return "*".join(parts) if parts else "1"

    def parse(self, text: str) -> list[Elt]:
        """Parse a comma-separated list of words such as ``"d^2,f*g*d"``."""
        out = []
        for word in text.split(","):
            word = word.strip()
            if not word:
                continue
            x = self.identity
            for tok in word.split("*"):
                tok = tok.strip()
                if tok == "1":
                    continue
                mt = re.fullmatch(r"([a-z][0-9]?)(?:\^(-?\d+))?", tok)
                if not mt or mt.group(1) not in self.gen_letters:
                    raise OutModelError(f"cannot parse {tok!r} for family {self.family}")
                e = int(mt.group(2)) if mt.group(2) else 1
                x = self.mul(x, self.power(self.gen_letters[mt.group(1)], e))
            out.append(x)
        return out

    def describe(self) -> dict:
        return {
            "family": self.family, "n": self.n, "q": self.q, "p": self.p, "m": self.m,
            "d": self.d, "order": self.order, "relations": list(self.relations),
            "generators": {k: self.fmt(v) for k, v in self.gen_letters.items()},
        }

    def __eq__(self, other):
        return isinstance(other, OutModel) and (self.family, self.n, self.q) == (other.family, other.n, other.q)

    def __hash__(self):
        return hash((self.family, self.n, self.q))

    def __reduce__(self):
        return (out_model, (self.family, self.n, self.q))


# ---------------------------------------------------------------------------
# construction

_C2 = (("1", "g"), ((0, 1), (1, 0)))


def _s3():
    # permutations of (delta1, delta2, delta3) indices; product = apply left, then right
    perms = [(0, 1, 2), (1, 0, 2), (1, 2, 0), (2, 0, 1), (0, 2, 1), (2, 1, 0)]
    names = ("1", "t", "r", "r^2", "t*r", "r*t")
    table = []
    for a in perms:
        row = []
        for b in perms:
            c = tuple(b[a[i]] for i in range(3))
            row.append(perms.index(c))
        table.append(tuple(row))
    # fix the names from the actual products
    t, r = perms.index((1, 0, 2)), perms.index((1, 2, 0))
    named = {0: "1", t: "t", r: "r", table[r][r]: "r^2", table[t][r]: "t*r", table[r][t]: "r*t"}
    names = tuple(named[i] for i in range(6))
    return perms, names, tuple(table)


def _klein_action(perm):
    coords = {0: (1, 0), 1: (0, 1), 2: (1, 1)}
    c1, c2 = coords[perm[0]], coords[perm[1]]
    return ((c1[0], c2[0]), (c1[1], c2[1]))


def out_model(family: str, n: int, q: int) -> OutModel:
    """The model of Out(G0) for the given family, rank parameter n and field size q."""
    if family not in FAMILIES:
        raise OutModelError(f"unsupported family {family!r}")
    try:
        p, m = prime_power(q)
    except FieldError as exc:
        raise OutModelError(str(exc)) from None
    if family == "d4":
        family, n = "dn_even", 4
    d = table2_d(family, n, q)

    def cyclic(fam, forder, phi_mult, graph, graph_mult, rels, letter="g"):
        names, table = graph
        acts = tuple(((1,),) if i == 0 else ((graph_mult % d if d else 0,),) for i in range(len(names)))
        letters = {"f": None, "d": None}
        om = OutModel(fam, n, q, p, m, d, (d,), forder, names, table, acts,
                      ((phi_mult % d,),), letters, letter, rels)
        letters["f"] = om.phi()
        letters["d"] = om.delta(1)
        if len(names) > 1:
            letters[letter] = om.elt(0, 1)
        return om

    trivial_graph = (("1",), ((0,),))
    tau_graph = (("1", "t"), _C2[1])

    if family == "psl":
        if n < 2:
            raise OutModelError("psl needs n >= 2")
        if n == 2:
            return cyclic(family, m, p, trivial_graph, 1, (f"d^{d} = 1", f"f^{m} = 1", "[d, f] = 1"))
        return cyclic(family, m, p, _C2, -1, (f"d^{d} = 1", f"f^{m} = 1", "g^2 = 1", "[f, g] = 1",
                                                  "d^f = d^p", "d^g = d^-1"))
    if family == "psu":
        if n < 3:
            raise OutModelError("psu needs n >= 3")
        return cyclic(family, 2 * m, p, trivial_graph, 1, (f"d^{d} = 1", f"f^{2 * m} = 1", "d^f = d^p"))
    if family in ("bc", "e7"):
        if family == "bc" and n < 2:
            raise OutModelError("bc needs n >= 2")
        if family == "e7":
            n = 7
        return cyclic(family, m, 1, trivial_graph, 1, (f"d^{d} = 1", f"f^{m} = 1", "[d, f] = 1"))
    if family == "e6":
        n = 6
        return cyclic(family, m, p, tau_graph, -1, (f"d^{d} = 1", f"f^{m} = 1", "t^2 = 1", "[f, t] = 1",
                                                     "d^f = d^p", "d^t = d^-1"), letter="t")
    if family == "2e6":
        n = 6
        return cyclic(family, 2 * m, -1, trivial_graph, 1, (f"d^{d} = 1", f"f^{2 * m} = 1", "d^f = d^-1"))
    if family == "2dn":
        if n < 4:
            raise OutModelError("2dn needs n >= 4")
        return cyclic(family, 2 * m, p, trivial_graph, 1, (f"d^{d} = 1", f"f^{2 * m} = 1", "d^f = d^p"))
    if family == "dn_odd":
        if n < 3 or n % 2 == 0:
            raise OutModelError("dn_odd needs odd n >= 3")
        return cyclic(family, m, p, tau_graph, -1, (f"d^{d} = 1", "t^2 = 1", f"f^{m} = 1", "[t, f] = 1",
                                                     "d^t = d^-1", "d^f = d^p"), letter="t")
    # dn_even
    if n < 4 or n % 2:
        raise OutModelError("dn_even needs even n >= 4")
    klein = d > 1
    nmod = (2, 2) if klein else ()
    if n == 4:
        perms, names, table = _s3()
        rels = ("d1*d2 = d3", "d_i^2 = 1", f"f^{m} = 1", "[r, f] = [t, f] = 1",
                "d1^t = d2", "d3^t = d3", "d1^r = d2", "d2^r = d3", "d3^r = d1")
    else:
        perms = [(0, 1, 2), (1, 0, 2)]
        names, table = ("1", "t"), _C2[1]
        rels = ("d1*d2 = d3", "d_i^2 = 1", f"f^{m} = 1", "[t, f] = 1", "d1^t = d2", "d3^t = d3")
    acts = tuple(_klein_action(pm) if klein else () for pm in perms)
    phi_act = _ident(2) if klein else ()
    letters: dict = {}
    om = OutModel("dn_even", n, q, p, m, d, nmod, m, names, table, acts, phi_act, letters, "t",
                  rels if klein else rels[2:3] + rels[3:4])
    letters["f"] = om.phi()
    letters["t"] = om.graph("t")
    if n == 4:
        letters["r"] = om.graph("r")
    if klein:
        letters["d1"] = om.delta(1, 0)
        letters["d2"] = om.delta(0, 1)
        letters["d3"] = om.delta(1, 1)
    return om


@dataclass(frozen=True)
class AbelianT:
    elements: frozenset
    generators: tuple
    maximal: bool

    def label(self, om: OutModel) -> str:
        return "<" + ", ".join(om.fmt(g) for g in self.generators) + ">"


def make_T(om: OutModel, gens: Iterable[Elt]) -> AbelianT:
    gens = [tuple(g) for g in gens]
    A = om.subgroup(gens)
    if not om.is_abelian(A):
        raise OutModelError("the subgroup is not abelian")
    return AbelianT(A, tuple(om.generators_of(A)), om.is_maximal_abelian(A))


def enumerate_maximal_abelian(om: OutModel) -> list[AbelianT]:
    """Every maximal abelian subgroup of the model, in a deterministic order."""
    if om.is_abelian(om.elements):
        whole = frozenset(om.elements)
        return [AbelianT(whole, tuple(om.generators_of(whole)), True)]
    out = []
    for A in om.abelian_subgroups():
        if om.centralizer(A) == A:
            out.append(AbelianT(A, tuple(om.generators_of(A)), True))
    return out


def find_conjugator(om: OutModel, A: frozenset, B: frozenset) -> Optional[Elt]:
    """Least y (in element order) with A^y = B, or None."""
    for y in om.elements:
        if frozenset(om.conj(x, y) for x in A) == B:
            return y
    return None


# ---------------------------------------------------------------------------
# outer images of semilinear words

def rho_image(om: OutModel, s: int, eps: int, diag_class: Sequence[int]) -> Elt:
    """phi^s * graph^eps * delta^diag_class as an OutModel element.

    Callers derive ``diag_class`` from determinant, similitude or character data
    of the word's matrix part.
    """
    g = 0
    if eps:
        if len(om.graph_names) < 2:
            raise OutModelError("graph flag in a model without graph automorphisms")
        g = om.graph_names.index(om.graph_letter) if om.graph_letter in om.graph_names else 1
    return om.elt(s, g, diag_class)
