"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import itertools
import random
import time

import numpy as np
import pytest

from abelsup.certify import (
    canonical_json,
    certify,
    mutate_certificate,
    natural_cells,
    replay,
    sweep,
)
from abelsup.cli import DEFAULT_SWEEP
from abelsup.field import field_of_order
from abelsup.lattice import (
    E6_ORDER,
    QCharacter,
    brute_force_extends,
    extends_self_conjugately,
    extends_to_P,
    extends_to_P_batch,
    family_root_system,
    lemma_coxeter_verify,
    root_system,
)
from abelsup.linear import build_A, build_X
from abelsup.ortho import SimilitudeContext, eta, sigma_ext_sq
from abelsup.semimat import (
    NO_GRAPH,
    Mat,
    SemilinearWord,
    apply_word,
    det,
    inverse,
    linear_word,
    mat_frob,
    mat_mul,
    mat_prod,
    scale,
    transpose,
    word_commutator,
    word_commutator_central,
)
from instances import (
    block_instances,
    comm_instances,
    equival_first,
    equival_second,
    equival_third,
    gx_instances,
    ublock_instances,
)
from oracles import oracle_one_minus_w, random_gl


@pytest.fixture
def report(capsys):
    def emit(num, title, ok, detail=""):
        with capsys.disabled():
            print(f"\nACCEPTANCE {num:2d} {'PASS' if ok else 'FAIL'}: {title}" + (f" [{detail}]" if detail else ""))
        assert ok, f"criterion {num}: {detail}"
    return emit


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_01_block_suite(report):
    def run():
        bad = 0
        insts = block_instances(random.Random(101), 1000)
        for f, w, l, s, eps, c in insts:
            A = build_A(f, w, l)
            if apply_word(linear_word(build_X(f, w, c), s=s, eps=eps), A) != scale(A, f.w(c)):
                bad += 1
        return len(insts), bad
    (n, bad), dt = timed(run)
    report(1, "block identity", bad == 0 and n >= 1000 and dt < 5, f"{n} instances, {bad} failures, {dt:.2f}s")


def test_02_ublock_suite(report):
    def run():
        bad = 0
        insts = ublock_instances(random.Random(102), 1000)
        for F, q, w, l, s, c in insts:
            A, X = build_A(F, w, l, q - 1), build_X(F, w, c, q - 1)
            word = SemilinearWord(s, 0, X, NO_GRAPH, F.m)
            if apply_word(word, A) != scale(A, F.w(c * (q - 1))):
                bad += 1
        return len(insts), bad
    (n, bad), dt = timed(run)
    report(2, "unitary block identity", bad == 0 and dt < 5, f"{n} instances, {bad} failures, {dt:.2f}s")


def test_03_comm_and_gx(report):
    def run():
        bad_c = bad_g = pos = 0
        cinst = comm_instances(random.Random(103), 500)
        for f, n, s, A, B in cinst:
            rel = B == mat_prod(transpose(A), mat_frob(B, s), A)
            trivial = word_commutator(linear_word(A, s=s), linear_word(B, eps=1)).X == Mat.identity(f, n)
            bad_c += rel != trivial
            pos += rel
        ginst = gx_instances(random.Random(104), 500)
        for f, w, s, a, b in ginst:
            u, v = linear_word(build_X(f, w, a), s=s), linear_word(build_X(f, w, b), eps=1)
            bad_g += word_commutator_central(u, v) != 1
        return len(cinst), len(ginst), bad_c, bad_g, pos
    (nc, ng, bc, bg, pos), dt = timed(run)
    ok = nc >= 500 and ng >= 500 and bc == bg == 0 and pos >= nc // 2 and dt < 5
    report(3, "comm equivalence and gX commutation", ok,
           f"comm {nc} ({pos} with the relation), gX {ng}, failures {bc}+{bg}, {dt:.2f}s")


def _sweep_ok(report_obj):
    t = report_obj["totals"]
    return t["FAIL"] == 0 and t["cell_errors"] == 0 and t["PASS"] == t["certificates"] > 0


def test_04_psl_sweep(report):
    qs = (4, 5, 7, 8, 9, 11, 13, 16, 25, 27)
    rep, dt = timed(lambda: sweep(natural_cells("psl", range(2, 7), qs)))
    alt6 = [r for e in rep["cells"] if (e["n"], e["q"]) == (2, 9) for r in e["certificates"]]
    ok = _sweep_ok(rep) and alt6 and all(r["verdict"] == "PASS" for r in alt6) and dt < 60
    t = rep["totals"]
    report(4, "PSL sweep", ok, f"{t['PASS']}/{t['certificates']} PASS over {t['cells']} cells, {dt:.1f}s")


def test_05_psu_sweep(report):
    rep, dt = timed(lambda: sweep(natural_cells("psu", range(3, 6), (3, 5, 7, 9))))
    t = rep["totals"]
    report(5, "PSU sweep", _sweep_ok(rep) and dt < 60,
           f"{t['PASS']}/{t['certificates']} PASS over {t['cells']} cells, {dt:.1f}s")


def test_06_coxeter(report):
    types = ([("A", n) for n in range(1, 7)] + [("B", n) for n in range(2, 6)] + [("C", n) for n in range(2, 6)]
             + [("D", n) for n in range(3, 7)] + [("E", 6), ("E", 7)])

    def run():
        checked, bad = 0, []
        for typ, n in types:
            rs = root_system(typ, n)
            orders = {tuple(range(n)), tuple(reversed(range(n))), tuple(range(0, n, 2)) + tuple(range(1, n, 2))}
            rng = random.Random(n)
            while len(orders) < min(3, len(list(itertools.permutations(range(n))))):
                orders.add(tuple(rng.sample(range(n), n)))
            if (typ, n) == ("E", 6):
                orders.add(tuple(E6_ORDER))
            for order in orders:
                checked += 1
                if not lemma_coxeter_verify(rs, order):
                    bad.append((typ, n, order))
        return checked, bad
    (checked, bad), dt = timed(run)
    report(6, "Coxeter unitriangularity", not bad and dt < 2, f"{checked} (type, order) pairs, {len(bad)} failures, {dt:.2f}s")


CHEVALLEY_CASES = (
    [("bc", n, q, None, typ) for typ, n in (("B", 2), ("B", 3), ("C", 3)) for q in (9, 25)]
    + [("e7", 7, q, None, None) for q in (9, 25)]
    + [("e6", 6, 13, "d", None), ("e6", 6, 25, "d,f*t", None), ("2e6", 6, 8, "d,f^2", None), ("2dn", 4, 3, None, None)]
)


def _self_conjugate_extension_oracle(rs, chi, q):
    """Search every psi on the weight lattice with psi(tau w) = q psi(w) restricting to chi."""
    n, M = rs.n, chi.M
    C = np.array(rs.cartan, dtype=np.int64)
    target = np.array(chi.exps, dtype=np.int64) % M
    for psi in itertools.product(range(M), repeat=n):
        v = np.array(psi, dtype=np.int64)
        if any((psi[rs.tau[i]] - q * psi[i]) % M for i in range(n)):
            continue
        if ((C @ v - target) % M == 0).all():
            return True
    return False


def test_07_chevalley_certificates(report):
    def run():
        rows = []
        for family, n, q, T, typ in CHEVALLEY_CASES:
            cert = certify(family, n, q, T, prefer="chevalley", typ=typ)
            rs = family_root_system(family, n, typ)
            M, p = cert["M"], field_of_order(q).p
            chi, chi_p = np.array(cert["chi"]), np.array(cert["chi_prime"])
            L = oracle_one_minus_w(rs, cert["order"])
            lhs = (L.T @ chi_p) % M
            perm = None
            if cert["graph"]:
                perm = rs.tau  # the only graph parts used are diagram involutions
            moved = chi[list(perm)] if perm else chi
            rhs = (chi - pow(p, cert["field_power"], M) * moved) % M
            eq = (lhs == rhs).all()
            qchi = QCharacter(tuple(int(x) for x in chi), M)
            if family in ("2e6", "2dn"):
                ext = (_self_conjugate_extension_oracle(rs, qchi, q) if rs.n <= 4
                       else extends_self_conjugately(rs, qchi, q))
            elif rs.n <= 4:
                ext = bool(brute_force_extends(rs, M)[tuple(int(x) for x in chi)])
            else:
                ext = extends_to_P(rs, qchi)
            ok = cert["verdict"] == "PASS" and cert["route"].startswith("chevalley-") and eq and not ext
            rows.append((f"{family}{rs.name}q{q}:{cert['route']}", ok))
        return rows
    rows, dt = timed(run)
    bad = [r for r, ok in rows if not ok]
    report(7, "Chevalley character certificates", not bad and dt < 10,
           f"{len(rows)} certificates, failing {bad}, {dt:.2f}s")


def test_08_extendability_exhaustive(report):
    types = ([("A", n) for n in range(1, 5)] + [("B", n) for n in range(2, 5)] + [("C", n) for n in range(2, 5)]
             + [("D", 3), ("D", 4)])

    def run():
        mism = checked = 0
        for typ, n in types:
            rs = root_system(typ, n)
            for M in range(1, 49):
                E = np.indices((M,) * n).reshape(n, -1).T
                got = extends_to_P_batch(rs, M, E)
                want = brute_force_extends(rs, M).reshape(-1)
                mism += int((got != want).sum())
                checked += len(E)
        return checked, mism
    (checked, mism), dt = timed(run)
    report(8, "extendability vs brute force", mism == 0 and dt < 60,
           f"{checked} characters over ranks <= 4 and M <= 48, {mism} mismatches, {dt:.1f}s")


def test_09_sigma_correspondence(report):
    def run():
        counts, bad = {}, []
        for q in (5, 9):
            f = field_of_order(q)
            sc = SimilitudeContext(3, f)
            rng = random.Random(900 + q)
            tau, w0 = sc.tau, sc.w0
            n = 0
            for _ in range(100):
                X, Y = random_gl(f, rng, 4), random_gl(f, rng, 4)
                sX, sY = sigma_ext_sq(X), sigma_ext_sq(Y)
                if sigma_ext_sq(mat_mul(X, Y)) != mat_mul(sX, sY):
                    bad.append(("hom", q))
                if eta(sc, sX) != det(X):
                    bad.append(("det", q))
                cmp = sigma_ext_sq(transpose(inverse(X)))
                if cmp != transpose(inverse(sX)) or cmp != scale(mat_prod(w0, tau, sX, tau, w0), f.inv(det(X))):
                    bad.append(("comparison", q))
                n += 1
            for _ in range(100):
                X, Y, z = equival_first(rng, f)
                assert mat_prod(inverse(Y), mat_frob(X, 1), Y) == scale(X, z)
                sX, sY = sigma_ext_sq(X), sigma_ext_sq(Y)
                if mat_prod(inverse(sY), mat_frob(sX, 1), sY) != scale(sX, f.mul(z, z)):
                    bad.append(("equival-1", q))

                X, Y, z = equival_second(rng, f)
                assert mat_prod(inverse(Y), transpose(inverse(X)), Y) == scale(X, z)
                sX = sigma_ext_sq(X)
                Z = mat_mul(w0, sigma_ext_sq(Y))
                if mat_prod(inverse(Z), tau, sX, tau, Z) != scale(sX, f.mul(f.mul(z, z), det(X))):
                    bad.append(("equival-2", q))

                X, Y, z = equival_third(rng, f)
                assert mat_mul(transpose(inverse(X)), Y) == scale(mat_mul(mat_frob(Y, 1), X), z)
                sX = sigma_ext_sq(X)
                Z = mat_mul(w0, sigma_ext_sq(Y))
                if mat_prod(tau, sX, tau, Z) != scale(mat_mul(mat_frob(Z, 1), sX), f.mul(f.mul(z, z), det(X))):
                    bad.append(("equival-3", q))
            counts[q] = n
        return counts, bad
    (counts, bad), dt = timed(run)
    report(9, "sigma correspondence", not bad and all(v >= 100 for v in counts.values()) and dt < 10,
           f"100 instances per property over F5 and F9, {len(bad)} failures {sorted(set(bad))[:4]}, {dt:.2f}s")


def test_10_dn_sweeps(report):
    cells = natural_cells("dn_odd", (3, 5), (9, 25)) + natural_cells("dn_even", (4, 6), (9, 25))
    rep, dt = timed(lambda: sweep(cells))
    partial_ok = []
    for q in (9, 25):
        cert = certify("dn_even", 4, q, "f*r*d2")
        checks = cert["commutator_transcript"][0]["checks"]
        partial_ok.append(cert["partial"] and cert["verdict"] == "PASS"
                          and checks["co8_identity"] and checks["xi_rho_invariant"])
    t = rep["totals"]
    ok = _sweep_ok(rep) and t["partial"] == 2 and all(partial_ok) and dt < 120
    report(10, "Dn sweeps", ok, f"{t['PASS']}/{t['certificates']} PASS, {t['partial']} partial (D4 case 4), {dt:.1f}s")


def test_11_mutation_robustness(report):
    pool = [certify(*a) for a in [("psl", 4, 9, 1), ("psl", 2, 9, 0), ("psu", 4, 3, 0), ("dn_odd", 3, 9, 0),
                                  ("dn_even", 4, 9, 3), ("dn_even", 4, 9, "f*r*d2"), ("bc", 2, 9, None),
                                  ("e6", 6, 25, 0), ("dn_even", 4, 9, "d2,d1")]]
    assert all(c["verdict"] == "PASS" for c in pool)
    rng = random.Random(1100)
    caught = semantic = 0
    for i in range(50):
        cert = pool[i % len(pool)]
        caught += replay(mutate_certificate(cert, rng))["verdict"] == "FAIL"
        semantic += replay(mutate_certificate(cert, rng, rehash=True))["verdict"] == "FAIL"
    report(11, "mutation robustness", caught == 50,
           f"{caught}/50 corrupted certificates rejected; with rehashing {semantic}/50 rejected by the algebra alone")


def test_12_determinism(report):
    cells = [c for f, ns, qs in DEFAULT_SWEEP for c in natural_cells(f, ns, qs)]
    serial = canonical_json(sweep(cells, 1))
    parallel = canonical_json(sweep(cells, 4))
    report(12, "serial and parallel sweeps identical", serial == parallel,
           f"{len(cells)} cells, {len(serial)} bytes")
