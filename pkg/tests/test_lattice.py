import itertools

import numpy as np
from oracles import oracle_one_minus_w
import pytest
from sympy import Matrix, eye

from abelsup.lattice import (
    E6_ORDER,
    LatticeError,
    QCharacter,
    brute_force_extends,
    c_basis,
    char_compose,
    char_eval,
    char_permute,
    chevalley_supplement,
    coxeter_map,
    d4_case4_characters,
    extends_to_P,
    extends_to_P_batch,
    inv_one_minus_w,
    lemma_coxeter_verify,
    one_minus_w_root,
    perm_matrix,
    psi_characters,
    root_system,
    self_conjugate,
    zero_character,
)

ALL_TYPES = [("A", n) for n in range(1, 7)] + [("B", n) for n in range(2, 6)] + [("C", n) for n in range(2, 6)] \
    + [("D", n) for n in range(3, 7)] + [("E", 6), ("E", 7)]


def test_root_system_examples():
    a1 = root_system("A", 1)
    assert a1.A == Matrix([[2]]) and a1.delta == 2
    assert root_system("E", 6).delta == 3
    d4 = root_system("D", 4)
    assert d4.delta == 4 and d4.delta1 == 2
    assert root_system("E", 7).delta == 2
    with pytest.raises(LatticeError):
        root_system("G", 2)


@pytest.mark.parametrize("typ,n", ALL_TYPES)
def test_cartan_matches_bourbaki_form(typ, n):
    rs = root_system(typ, n)
    C = rs.A
    assert all(C[i, i] == 2 for i in range(n))
    # symmetrizable with positive diagonal: D C symmetric for some positive D
    assert C.det() == rs.delta


def test_a2_one_minus_w_on_omega1():
    rs = root_system("A", 2)
    W = coxeter_map(rs, [0, 1])
    img = rs.A.T.inv() * (eye(2) - W)
    assert list(img[:, 0]) == [1, 0]


@pytest.mark.parametrize("typ,n", ALL_TYPES)
def test_root_coordinates_match_oracle(typ, n):
    rs = root_system(typ, n)
    for order in (list(range(n)), list(reversed(range(n)))):
        ours = np.array(one_minus_w_root(rs, order).tolist(), dtype=np.int64)
        assert (ours == oracle_one_minus_w(rs, order)).all()


@pytest.mark.parametrize("typ,n", ALL_TYPES)
def test_lemma_coxeter_orders(typ, n):
    rs = root_system(typ, n)
    orders = [list(range(n)), list(reversed(range(n))), list(range(0, n, 2)) + list(range(1, n, 2))]
    if (typ, n) == ("E", 6):
        orders.append(list(E6_ORDER))
    for order in orders:
        assert lemma_coxeter_verify(rs, order)
        assert (eye(n) - coxeter_map(rs, order)).det() != 0


def test_e6_order_is_s1s4s6s3s2s5():
    assert [i + 1 for i in E6_ORDER] == [1, 4, 6, 3, 2, 5]
    W = coxeter_map(root_system("E", 6), E6_ORDER)
    assert all(x.is_integer for x in W)


def test_inv_one_minus_w_integrality():
    a1 = root_system("A", 1)
    assert inv_one_minus_w(a1, [0]) == eye(1)
    e6 = root_system("E", 6)
    assert all(x.is_integer for x in inv_one_minus_w(e6, E6_ORDER))
    d4 = root_system("D", 4)
    inv_one_minus_w(d4, range(4))
    with pytest.raises(LatticeError):
        inv_one_minus_w(d4, range(4), delta1=1)


def test_one_plus_tau_over_one_minus_w_e6():
    e6 = root_system("E", 6)
    F = (eye(6) + perm_matrix(e6.tau)) * one_minus_w_root(e6, E6_ORDER).inv()
    assert all(x.is_integer for x in F)


def test_char_compose_basics():
    rs = root_system("B", 3)
    chi = QCharacter((1, 5, 7), 8)
    assert char_compose(chi, eye(3)) == chi
    L = one_minus_w_root(rs, range(3))
    assert char_compose(chi.scale(3), L) == char_compose(chi, L).scale(3)


def test_extends_examples():
    d4 = root_system("D", 4)
    assert extends_to_P(d4, zero_character(d4, 8))
    psi1, psi2 = psi_characters(d4, 8)
    cb = c_basis(d4)
    assert char_eval(psi1, cb[2]) == 1 and char_eval(psi1, cb[3]) == 0
    assert not extends_to_P(d4, psi1) and not extends_to_P(d4, psi2)
    a2 = root_system("A", 2)
    mask = brute_force_extends(a2, 3)
    assert extends_to_P(a2, QCharacter((1, 0), 3)) == bool(mask[1, 0])


def test_d_even_squares_criterion():
    # for D_n, n even: chi extends iff chi(c_{n-1}), chi(c_n) are squares
    for n, M in [(4, 8), (4, 24), (6, 8)]:
        rs = root_system("D", n)
        cb = c_basis(rs)
        for e in itertools.islice(itertools.product(range(M), repeat=n), 0, None, 7):
            chi = QCharacter(e, M)
            squares = char_eval(chi, cb[-2]) % 2 == 0 and char_eval(chi, cb[-1]) % 2 == 0
            assert extends_to_P(rs, chi) == squares


@pytest.mark.parametrize("typ,n", [("A", 2), ("B", 3), ("C", 3), ("D", 4)])
def test_extends_batch_vs_brute_force(typ, n):
    rs = root_system(typ, n)
    for M in (2, 4, 6, 8, 9, 12):
        E = np.indices((M,) * n).reshape(n, -1).T
        assert (extends_to_P_batch(rs, M, E) == brute_force_extends(rs, M).reshape(-1)).all()


def test_self_conjugate_examples():
    a2 = root_system("A", 2)
    q, M = 4, 15
    assert self_conjugate(a2, zero_character(a2, M), q)
    # tau-fixed with values in F_q^x (exponents divisible by q+1): self-conjugate
    assert self_conjugate(a2, QCharacter((5, 5), M), q)
    # tau-fixed with values of order q+1 only: chi(x)^q = chi(x)^-1, not self-conjugate
    assert not self_conjugate(a2, QCharacter((3, 3), M), q)
    assert not self_conjugate(a2, QCharacter((1, 2), M), q)
    with pytest.raises(LatticeError):
        self_conjugate(root_system("B", 2), zero_character(root_system("B", 2), M), q)


def test_bc_q9_frozen():
    rs = root_system("B", 2)
    data = chevalley_supplement("bc", rs, 9)
    assert data.ok
    assert data.chi.exps == (1, 0) and data.chi_prime.exps == (6, 1)
    # chi' = -zeta_chi and chi' o (1-w) = -2 chi mod 8
    zeta = char_compose(data.chi, inv_one_minus_w(rs, data.order))
    assert data.chi_prime == zeta.scale(-1)
    L = oracle_one_minus_w(rs, data.order)
    assert tuple((L.T @ np.array(data.chi_prime.exps)) % 8) == tuple((-2 * np.array(data.chi.exps)) % 8)
    assert not extends_to_P(rs, data.chi)


def test_e6_q13_frozen():
    rs = root_system("E", 6)
    data = chevalley_supplement("e6", rs, 13)
    assert data.ok and data.case == "e6_case1"
    assert data.chi_prime.exps == (4, 0, 4, 0, 8, 8)
    zeta = char_compose(data.chi, inv_one_minus_w(rs, data.order))
    assert data.chi_prime == zeta.scale(-4)
    L = oracle_one_minus_w(rs, data.order)
    assert tuple((L.T @ np.array(data.chi_prime.exps)) % 12) == tuple((-12 * np.array(data.chi.exps)) % 12)


def test_twisted_frozen():
    e6 = root_system("E", 6)
    d = chevalley_supplement("2e6", e6, 8)
    assert d.ok and d.chi.exps == (0, 0, 1, 0, 8, 0)
    assert self_conjugate(e6, d.chi, 8) and self_conjugate(e6, d.chi_prime, 8)
    assert (1 - 2 ** 2) % 3 == 0
    d4 = root_system("D", 4)
    d = chevalley_supplement("2dn", d4, 3)
    assert d.ok and d.chi.exps == (0, 0, 1, 3)
    L = oracle_one_minus_w(d4, d.order)
    # twisted: Frobenius acts on characters as multiplication by p
    rhs = ((1 - 3) * np.array(d.chi.exps)) % 8
    assert tuple((L.T @ np.array(d.chi_prime.exps)) % 8) == tuple(rhs)


@pytest.mark.parametrize("family,typ,n,q", [("bc", "B", 3, 25), ("bc", "C", 3, 9), ("e7", "E", 7, 9),
                                            ("e6", "E", 6, 25), ("e6", "E", 6, 343), ("e6", "E", 6, 64)])
def test_other_chevalley_cases(family, typ, n, q):
    data = chevalley_supplement(family, root_system(typ, n), q)
    assert data.ok
    assert not extends_to_P(data.rs, data.chi)


def test_chevalley_rejects_wrong_regime():
    with pytest.raises(LatticeError):
        chevalley_supplement("e6", root_system("E", 6), 5)


def test_d4_case4_characters_q9():
    xi, xi1, verdicts = d4_case4_characters(9)
    assert xi.exps == (1, 6, 1, 1) and xi1.exps == (7, 1, 7, 0)
    assert verdicts["xi_extends"] and verdicts["xi_rho_invariant"]
    assert verdicts["xi1_class"] == (0, 1)
    d4 = root_system("D", 4)
    cb = c_basis(d4)
    assert char_eval(xi, cb[2]) == 0 and char_eval(xi, cb[3]) == 0
    assert char_eval(xi1, cb[2]) == 0 and char_eval(xi1, cb[3]) == 1
    assert char_permute(xi, d4.triality) == xi


@pytest.mark.parametrize("family,n,q", [("bc", 2, 9), ("e7", 7, 9), ("e6", 6, 13), ("e6", 6, 25), ("2e6", 6, 8),
                                        ("2dn", 4, 3), ("dn_even", 4, 9), ("dn_even", 4, 25)])
def test_char_calculus_rho_is_a_homomorphism(family, n, q):
    import random

    from abelsup.lattice import CharContext
    from abelsup.outgroup import out_model

    om = out_model(family, n, q)
    ctx = CharContext(om)
    rng = random.Random(7)
    E = om.elements
    for x in E:
        assert ctx.rho(ctx.lift(x)) == x
    for _ in range(60):
        x, y = rng.choice(E), rng.choice(E)
        u, v = ctx.lift(x), ctx.lift(y)
        psi = QCharacter(tuple(rng.randrange(ctx.M) for _ in range(ctx.rs.n)), ctx.M)
        if ctx.twisted:
            # psi + q (psi o tau) is self-conjugate
            psi = psi + char_permute(psi, ctx.rs.tau).scale(q)
        t = ctx.word(0, 0, psi)
        ut = ctx.mul(u, t)
        assert ctx.rho(ut) == om.mul(x, ctx.rho(t))
        assert ctx.rho(ctx.mul(ut, v)) == om.mul(ctx.rho(ut), y)
        assert ctx.rho(ctx.mul(u, v)) == om.mul(x, y)
        assert ctx.rho(ctx.inv(u)) == om.inv(x)
        assert ctx.is_identity(ctx.mul(u, ctx.inv(u)))
