"""Dense matrices over a FieldSpec and semilinear words acting on them.

A word ``(s, eps, X)`` is the automorphism ``g -> X^-1 * F^s(G^eps(g)) * X`` of the
matrix group, where F is the entrywise Frobenius x -> x^p and G is the graph map
of the ambient context (inverse transpose for linear groups, conjugation by a
fixed involution for orthogonal groups, nothing for unitary groups).  Words are
composed left to right: ``compose(u, v)`` means "apply u, then v".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .field import FieldSpec, frob


class MatrixError(ValueError):
    pass


class Mat:
    __slots__ = ("f", "rows", "n")

    def __init__(self, f: FieldSpec, rows):
        self.f = f
        self.rows = tuple(tuple(r) for r in rows)
        self.n = len(self.rows)
        if any(len(r) != self.n for r in self.rows):
            raise MatrixError("matrix must be square")

    # constructors ---------------------------------------------------------
    @classmethod
    def identity(cls, f: FieldSpec, n: int) -> "Mat":
        return cls(f, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def scalar(cls, f: FieldSpec, n: int, x: int) -> "Mat":
        return cls(f, [[x if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, f: FieldSpec, entries: Sequence[int]) -> "Mat":
        n = len(entries)
        return cls(f, [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_ints(cls, f: FieldSpec, rows) -> "Mat":
        """Rows of plain integers, read through Z -> F_p."""
        return cls(f, [[f.from_int(x) for x in r] for r in rows])

    # basic protocol -------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, Mat) and self.f == other.f and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"Mat({self.f}, {[list(r) for r in self.rows]})"

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __mul__(self, other: "Mat") -> "Mat":
        return mat_mul(self, other)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def is_diagonal(self) -> bool:
        return all(self.rows[i][j] == 0 for i in range(self.n) for j in range(self.n) if i != j)

    def diagonal(self) -> list[int]:
        return [self.rows[i][i] for i in range(self.n)]


def _check_same(a: Mat, b: Mat):
    if a.f != b.f:
        raise MatrixError("matrices over different fields")
    if a.n != b.n:
        raise MatrixError("dimension mismatch")


def mat_mul(a: Mat, b: Mat) -> Mat:
    _check_same(a, b)
    f = a.f
    bt = list(zip(*b.rows))
    add, mul = f.add, f.mul
    if f.m == 1:
        p = f.p
        rows = [[sum(x * y for x, y in zip(r, c)) % p for c in bt] for r in a.rows]
        return Mat(f, rows)
    rows = []
    for r in a.rows:
        row = []
        for c in bt:
            acc = 0
            for x, y in zip(r, c):
                if x and y:
                    acc = add(acc, mul(x, y))
            row.append(acc)
        rows.append(row)
    return Mat(f, rows)


def mat_prod(*ms: Mat) -> Mat:
    out = ms[0]
    for m in ms[1:]:
        out = mat_mul(out, m)
    return out


def transpose(a: Mat) -> Mat:
    return Mat(a.f, list(zip(*a.rows)))


def scale(a: Mat, x: int) -> Mat:
    return Mat(a.f, [[a.f.mul(x, y) for y in r] for r in a.rows])


def mat_frob(a: Mat, s: int) -> Mat:
    """Entrywise x -> x^(p^s)."""
    if s % a.f.m == 0:
        return a
    return Mat(a.f, [[frob(a.f, x, s) for x in r] for r in a.rows])


def _eliminate(a: Mat, want_inverse: bool):
    f, n = a.f, a.n
    m = [list(r) + ([1 if i == j else 0 for j in range(n)] if want_inverse else []) for i, r in enumerate(a.rows)]
    det = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            return 0, None
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = f.neg(det)
        pv = m[col][col]
        det = f.mul(det, pv)
        ip = f.inv(pv)
        m[col] = [f.mul(ip, x) for x in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                c = m[r][col]
                m[r] = [f.sub(x, f.mul(c, y)) for x, y in zip(m[r], m[col])]
    inv = Mat(f, [row[n:] for row in m]) if want_inverse else None
    return det, inv


def det(a: Mat) -> int:
    return _eliminate(a, False)[0]


def inverse(a: Mat) -> Mat:
    d, inv = _eliminate(a, True)
    if not d:
        raise MatrixError("singular matrix")
    return inv


def mat_pow(a: Mat, k: int) -> Mat:
    if k < 0:
        a, k = inverse(a), -k
    out = Mat.identity(a.f, a.n)
    base = a
    while k:
        if k & 1:
            out = mat_mul(out, base)
        base = mat_mul(base, base)
        k >>= 1
    return out


def block_diag(blocks: Sequence[Mat]) -> Mat:
    if not blocks:
        raise MatrixError("no blocks")
    f = blocks[0].f
    if any(b.f != f for b in blocks):
        raise MatrixError("blocks over different fields")
    n = sum(b.n for b in blocks)
    rows = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i in range(b.n):
            rows[off + i][off:off + b.n] = b.rows[i]
        off += b.n
    return Mat(f, rows)


def rank(a: Mat) -> int:
    return len(row_basis(a))


def row_basis(a: Mat) -> list[int]:
    """Indices of rows forming a basis of the row space (greedy, in order)."""
    f = a.f
    basis: list[tuple[int, list[int]]] = []  # (pivot column, reduced row)
    picked = []
    for idx, r in enumerate(a.rows):
        v = list(r)
        for pc, b in basis:
            if v[pc]:
                c = v[pc]
                v = [f.sub(x, f.mul(c, y)) for x, y in zip(v, b)]
        pc = next((j for j, x in enumerate(v) if x), None)
        if pc is None:
            continue
        iv = f.inv(v[pc])
        basis.append((pc, [f.mul(iv, x) for x in v]))
        picked.append(idx)
    return picked


def projective_scalar(a: Mat, b: Mat) -> Optional[int]:
    """The scalar lam with a = lam * b, or None."""
    _check_same(a, b)
    f = a.f
    lam = None
    for ra, rb in zip(a.rows, b.rows):
        for x, y in zip(ra, rb):
            if y == 0:
                if x != 0:
                    return None
                continue
            if x == 0:
                return None
            r = f.div(x, y)
            if lam is None:
                lam = r
            elif r != lam:
                return None
    return lam


def scalar_value(a: Mat) -> Optional[int]:
    """The scalar if a is a scalar matrix, else None."""
    x = a.rows[0][0]
    for i in range(a.n):
        for j in range(a.n):
            if a.rows[i][j] != (x if i == j else 0):
                return None
    return x


# ---------------------------------------------------------------------------
# graph maps

@dataclass(frozen=True)
class GraphMap:
    """An involutive automorphism G of the ambient matrix group."""

    kind: str  # "inverse-transpose" | "conj-tau" | "none"
    tau: Optional[Mat] = None

    def __call__(self, a: Mat) -> Mat:
        if self.kind == "inverse-transpose":
            return transpose(inverse(a))
        if self.kind == "conj-tau":
            return mat_prod(self.tau, a, self.tau)
        if self.kind == "none":
            raise MatrixError("no graph map in this context")
        raise MatrixError(f"unknown graph kind {self.kind}")


INVERSE_TRANSPOSE = GraphMap("inverse-transpose")
NO_GRAPH = GraphMap("none")


@dataclass(frozen=True)
class CenterSpec:
    """Scalars to quotient by: all nonzero scalars, or those of order dividing ``order``."""

    order: Optional[int] = None

    def contains(self, f: FieldSpec, x: int) -> bool:
        if x == 0:
            return False
        if self.order is None:
            return True
        return f.pow(x, self.order) == 1


@dataclass(frozen=True)
class SemilinearWord:
    s: int
    eps: int
    X: Mat
    graph: GraphMap = INVERSE_TRANSPOSE
    forder: int = 0  # order of the field automorphism; 0 means the field degree m

    def __post_init__(self):
        if self.eps not in (0, 1):
            raise MatrixError("graph flag must be 0 or 1")
        if self.eps and self.graph.kind == "none":
            raise MatrixError("graph flag set in a context without graph map")
        order = self.forder or self.X.f.m
        object.__setattr__(self, "forder", order)
        object.__setattr__(self, "s", self.s % order)

    @property
    def f(self) -> FieldSpec:
        return self.X.f

    def with_matrix(self, X: Mat) -> "SemilinearWord":
        return SemilinearWord(self.s, self.eps, X, self.graph, self.forder)


def _field_part(w: SemilinearWord, a: Mat) -> Mat:
    """F^s(G^eps(a)); graph first, then Frobenius (they commute)."""
    if w.eps:
        a = w.graph(a)
    return mat_frob(a, w.s)


def apply_word(w: SemilinearWord, a: Mat) -> Mat:
    """Image a^w = X^-1 F^s(G^eps(a)) X."""
    return mat_prod(inverse(w.X), _field_part(w, a), w.X)


def compose(u: SemilinearWord, v: SemilinearWord) -> SemilinearWord:
    """The word 'u then v'."""
    if u.graph != v.graph or u.forder != v.forder:
        raise MatrixError("words from different contexts")
    X = mat_mul(_field_part(v, u.X), v.X)
    return SemilinearWord(u.s + v.s, (u.eps + v.eps) % 2, X, u.graph, u.forder)


def word_inverse(u: SemilinearWord) -> SemilinearWord:
    t = SemilinearWord(-u.s, u.eps, Mat.identity(u.f, u.X.n), u.graph, u.forder)
    return t.with_matrix(inverse(_field_part(t, u.X)))


def word_commutator(u: SemilinearWord, v: SemilinearWord) -> SemilinearWord:
    """u^-1 v^-1 u v, as a word."""
    return compose(compose(compose(word_inverse(u), word_inverse(v)), u), v)


def conjugate_word(u: SemilinearWord, x: SemilinearWord) -> SemilinearWord:
    """x^-1 u x."""
    return compose(compose(word_inverse(x), u), x)


class NonLinearCommutator(MatrixError):
    pass


def word_commutator_central(u: SemilinearWord, v: SemilinearWord, z: CenterSpec = CenterSpec()) -> Optional[int]:
    """Scalar of [u, v] if it is a central inner automorphism, else None."""
    c = word_commutator(u, v)
    if c.s != 0 or c.eps != 0:
        raise NonLinearCommutator("commutator keeps a field or graph part")
    lam = scalar_value(c.X)
    if lam is None or not z.contains(c.f, lam):
        return None
    return lam


def linear_word(X: Mat, s: int = 0, eps: int = 0) -> SemilinearWord:
    return SemilinearWord(s, eps, X, INVERSE_TRANSPOSE)

