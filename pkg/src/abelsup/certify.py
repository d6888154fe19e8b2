"""Certificates for T-abelian supplements: build, verify, serialize, replay.

A certificate is a JSON-ready dict.  Its payload (family, n, q, T, route and the
generator data) is produced by the construction code; the transcripts and the
verdict are produced by :func:`verify_payload`, which rebuilds everything from the
serialized data alone.  ``payload_sha256`` covers the whole certificate except
itself, so a replay detects any edit of the stored data.

Certificate kinds:

``matrix``
    semilinear words ``(s, eps, X)``; X as row-major discrete logs, ``null`` for 0
``character``
    words ``(f, g, chi)`` in the character calculus of the root lattice
``character-equation``
    the pair ``(chi, chi')`` with a Coxeter order; abelianity is the lattice
    equation ``chi' o (1-w) = (1-g) chi``
``partial``
    the D4 triality case: a CO_8 identity plus lattice checks
``split``
    no generators; the splitting criterion for Aut(G0) over G0 is recorded
``conjugate`` / ``restriction``
    a base certificate plus a conjugating element, or the inclusion of T in the
    base target
"""

from __future__ import annotations

import hashlib
import json
import random
from concurrent.futures import ProcessPoolExecutor
from math import gcd
from typing import Iterable, Optional, Sequence

from .field import FieldError, dlog, prime_power
from .lattice import (
    CharContext,
    LatticeError,
    QCharacter,
    char_compose,
    char_permute,
    chevalley_supplement,
    extends_self_conjugately,
    extends_to_P,
    family_root_system,
    one_minus_w_root,
    perm_matrix,
    root_system,
    self_conjugate,
)
from .linear import ConstructionError, LinearContext, psl_supplement
from .ortho import (
    OrthoContext,
    canonical_conjugate,
    d2_blocks,
    dn_even_case,
    dn_odd_case,
    d4_case4,
    H_matrix,
    ortho_supplement,
    torus_character,
    _assemble,
)
from .outgroup import (
    AbelianT,
    OutModel,
    OutModelError,
    aut_splits,
    enumerate_maximal_abelian,
    make_T,
    out_model,
    table2_d,
)
from .semimat import (
    Mat,
    MatrixError,
    NonLinearCommutator,
    SemilinearWord,
    inverse,
    mat_frob,
    mat_mul,
    mat_prod,
    scale,
    word_commutator_central,
)
from .unitary import UnitaryContext, psu_supplement

SCHEMA = "abelsup-certificate"
VERSION = 1
SWEEP_SCHEMA = "abelsup-sweep"

CHEVALLEY_FAMILIES = ("bc", "e7", "e6", "2e6", "2dn")
FIXED_RANK = {"e6": 6, "2e6": 6, "e7": 7, "d4": 4}


class CertifyError(ValueError):
    pass


# ---------------------------------------------------------------------------
# serialization helpers

def encode_mat(X: Mat) -> list:
    f = X.f
    return [[None if x == 0 else dlog(f, x) for x in row] for row in X.rows]


def decode_mat(f, rows) -> Mat:
    if not isinstance(rows, list) or not rows:
        raise CertifyError("malformed matrix")
    out = []
    for r in rows:
        if not isinstance(r, list) or len(r) != len(rows):
            raise CertifyError("matrix is not square")
        row = []
        for e in r:
            if e is None:
                row.append(0)
            elif isinstance(e, int) and not isinstance(e, bool):
                row.append(f.w(e))
            else:
                raise CertifyError("matrix entries must be integers or null")
        out.append(row)
    return Mat(f, out)


def field_descriptor(f) -> dict:
    return {"p": f.p, "m": f.m, "modulus": list(f.modulus_poly)}


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def payload_hash(cert: dict) -> str:
    body = {k: v for k, v in cert.items() if k != "payload_sha256"}
    return hashlib.sha256(canonical_json(body).encode()).hexdigest()


# ---------------------------------------------------------------------------
# contexts and T handling

def matrix_context(om: OutModel):
    if om.family == "psl":
        return LinearContext(om)
    if om.family == "psu":
        return UnitaryContext(om)
    if om.family in ("dn_odd", "dn_even"):
        return OrthoContext(om)
    raise CertifyError(f"no matrix model for {om.family}")


def matrix_dimension(om: OutModel) -> int:
    return 2 * om.n if om.family in ("dn_odd", "dn_even") else om.n


def resolve_T(om: OutModel, T) -> AbelianT:
    if isinstance(T, AbelianT):
        return T
    if isinstance(T, str):
        return make_T(om, om.parse(T))
    if isinstance(T, int):
        Ts = enumerate_maximal_abelian(om)
        if not 0 <= T < len(Ts):
            raise CertifyError(f"T index {T} out of range (0..{len(Ts) - 1})")
        return Ts[T]
    return make_T(om, T)


def _header(om: OutModel, T: AbelianT, route: str, kind: str, family: str) -> dict:
    return {
        "schema": SCHEMA,
        "version": VERSION,
        "family": family,
        "n": om.n,
        "q": om.q,
        "T": [om.fmt(g) for g in T.generators],
        "T_order": len(T.elements),
        "route": route,
        "kind": kind,
    }


# ---------------------------------------------------------------------------
# construction dispatch (payload only; the verdict comes from verify_payload)

def _matrix_payload(om, T, sup, family) -> dict:
    ctx = matrix_context(om)
    out = _header(om, T, sup.route, "matrix", family)
    out["context"] = ctx.kind
    out["field"] = field_descriptor(ctx.f)
    out["generators"] = [{"s": w.s, "eps": w.eps, "X": encode_mat(w.X)} for w in sup.words]
    out["notes"] = {k: v for k, v in sup.notes.items() if isinstance(v, (int, str))}
    return out


def _char_payload(om, T, ctx: CharContext, words, route, family, notes=None) -> dict:
    out = _header(om, T, route, "character", family)
    out["root_system"] = ctx.rs.name
    out["M"] = ctx.M
    out["generators"] = [{"f": w.f, "g": w.g, "chi": list(w.chi.exps)} for w in words]
    out["notes"] = notes or {}
    return out


def _split_payload(om, T, family) -> dict:
    out = _header(om, T, "split-by-classification", "split", family)
    out["criterion"] = split_criterion(om.family, om.n, om.q)
    return out


def _fail_payload(om, T, family, reason) -> dict:
    out = _header(om, T, "none", "none", family)
    out["reason"] = reason
    return out


def split_criterion(family: str, n: int, q: int) -> dict:
    p, m = prime_power(q)
    d = table2_d(family, n, q)
    if family in ("dn_odd", "dn_even", "d4"):
        N = q ** n - 1
    elif family == "2dn":
        N = q ** n + 1
    elif family in ("psu", "2e6"):
        N = q + 1
    else:
        N = q - 1
    return {"d": d, "m": m, "N": N, "gcd(N/d, d, m)": gcd(gcd(N // d, d), m), "splits": aut_splits(family, n, q)}


def chevalley_target(om: OutModel) -> Optional[tuple]:
    """(case, target subgroup) of the character construction, if the arithmetic allows it."""
    fam, p = om.family, om.p
    if fam in ("bc", "e7"):
        if p == 2:
            return None
        return fam, frozenset(om.elements)
    if fam == "2dn":
        if p == 2 or om.n % 2:
            return None
        return "2dn", frozenset(om.elements)
    if fam == "e6":
        if om.d != 3:
            return None
        if p % 3 == 1:
            return "e6_case1", om.subgroup(om.parse("d,f"))
        return "e6_case2", om.subgroup(om.parse("d,f*t"))
    if fam == "2e6":
        if om.d != 3:
            return None
        return "2e6", om.subgroup(om.parse("d,f^2"))
    return None


def graph_field_conjugator(om: OutModel, T: AbelianT):
    """(T0, y) with T0 inside the graph-field part and T0^y = T, or None."""
    for y in om.elements:
        yi = om.inv(y)
        T0 = frozenset(om.conj(x, yi) for x in T.elements)
        if all(not any(x[2:]) for x in T0):
            return T0, y
    return None


def _char_cyclic(om, T, family, typ=None) -> dict:
    ctx = CharContext(om, typ)
    gen = next(x for x in sorted(T.elements) if om.order_of(x) == len(T.elements))
    return _char_payload(om, T, ctx, [ctx.lift(gen)], "cyclic-lift", family, {"generator": om.fmt(gen)})


def _char_graph_field(om, T, family, typ=None) -> Optional[dict]:
    found = graph_field_conjugator(om, T)
    if found is None:
        return None
    T0, y = found
    ctx = CharContext(om, typ)
    zero = ctx.identity_word().chi
    words = [ctx.conj(ctx.word(x[0], x[1], zero.exps), ctx.lift(y)) for x in om.generators_of(T0)]
    route = "graph-field" if not any(y[2:]) and y[0] == 0 and y[1] == 0 else "graph-field-conjugate"
    return _char_payload(om, T, ctx, words, route, family, {"conjugator": om.fmt(y)})


def _equation_payload(om, T, case, family, typ=None) -> dict:
    rs = family_root_system(om.family, om.n, typ)
    data = chevalley_supplement(case, rs, om.q)
    out = _header(om, T, f"chevalley-{data.case}", "character-equation", family)
    out["root_system"] = rs.name
    out["M"] = data.M
    out["order"] = list(data.order)
    out["chi"] = list(data.chi.exps)
    out["chi_prime"] = list(data.chi_prime.exps)
    out["field_power"] = data.field_power
    out["graph"] = data.graph
    out["case"] = data.case
    return out


def _partial_payload(om, T, family) -> dict:
    ctx = OrthoContext(om)
    c4 = d4_case4(ctx)
    out = _header(om, T, "dn_even-case4", "partial", family)
    out["field"] = field_descriptor(ctx.f)
    out["A1"] = encode_mat(c4.A1)
    out["B"] = encode_mat(c4.B)
    out["xi"] = list(c4.xi.exps)
    out["xi1"] = list(c4.xi1.exps)
    out["M"] = c4.xi.M
    return out


def _wrap(om, T, kind, route, family, base, **extra) -> dict:
    out = _header(om, T, route, kind, family)
    out.update(extra)
    out["base"] = base
    return out


def build_payload(family: str, n: int, q: int, T=None, prefer: Optional[str] = None, typ: Optional[str] = None) -> dict:
    om = out_model(family, n, q)
    if T is None:
        T = make_T(om, om.elements) if om.is_abelian(om.elements) else None
        if T is None:
            raise CertifyError("Out(G0) is not abelian: give T")
    T = resolve_T(om, T)
    if not om.is_abelian(T.elements):
        raise CertifyError("T is not abelian")
    fam = om.family
    try:
        if fam == "psl":
            return _matrix_payload(om, T, psl_supplement(om, T), family)
        if fam == "psu":
            return _matrix_payload(om, T, psu_supplement(om, T), family)
        if fam in ("dn_odd", "dn_even"):
            return _dn_payload(om, T, family, prefer)
        if fam in CHEVALLEY_FAMILIES:
            return _chevalley_payload(om, T, family, prefer, typ)
    except (ConstructionError, LatticeError, MatrixError) as exc:
        if aut_splits(fam, om.n, om.q):
            return _split_payload(om, T, family)
        return _fail_payload(om, T, family, f"construction failed: {exc}")
    raise CertifyError(f"unsupported family {family}")


def _chevalley_payload(om, T, family, prefer, typ) -> dict:
    tgt = chevalley_target(om)
    cyclic = om.is_cyclic(T.elements)
    if tgt is not None and tgt[1] == T.elements and (not cyclic or prefer == "chevalley"):
        return _equation_payload(om, T, tgt[0], family, typ)
    if cyclic:
        return _char_cyclic(om, T, family, typ)
    if not T.maximal:
        for M in enumerate_maximal_abelian(om):
            if T.elements <= M.elements:
                base = certify(om.family, om.n, om.q, M, prefer=prefer, typ=typ)
                return _wrap(om, T, "restriction", base["route"] + "+restriction", family, base)
    gf = _char_graph_field(om, T, family, typ)
    if gf is not None:
        return gf
    if aut_splits(om.family, om.n, om.q):
        return _split_payload(om, T, family)
    return _fail_payload(om, T, family, "no construction applies")


def _dn_payload(om, T, family, prefer) -> dict:
    cyclic = om.is_cyclic(T.elements)
    if om.p == 2:
        if cyclic:
            return _char_cyclic(om, T, family)
        gf = _char_graph_field(om, T, family)
        if gf is not None:
            return gf
        return _split_payload(om, T, family)
    finder = dn_odd_case if om.family == "dn_odd" else dn_even_case
    case = finder(om, T)
    if case == "case4":
        return _partial_payload(om, T, family)
    if case is not None:
        return _matrix_payload(om, T, ortho_supplement(om, T), family)
    if cyclic:
        gen = next(x for x in sorted(T.elements) if om.order_of(x) == len(T.elements))
        if gen[1] in (0, 1):
            return _matrix_payload(om, T, ortho_supplement(om, T), family)
        return _char_cyclic(om, T, family)
    if not T.maximal:
        for M in enumerate_maximal_abelian(om):
            if T.elements <= M.elements:
                base = certify(om.family, om.n, om.q, M, prefer=prefer)
                return _wrap(om, T, "restriction", base["route"] + "+restriction", family, base)
    gf = _char_graph_field(om, T, family)
    if gf is not None:
        return gf
    if canonical_conjugate(om, T, matrix_only=True) is not None:
        return _matrix_payload(om, T, ortho_supplement(om, T), family)
    found = canonical_conjugate(om, T)
    if found is not None:
        T0, case0, y = found
        base = certify(om.family, om.n, om.q, T0, prefer=prefer)
        return _wrap(om, T, "conjugate", f"{base['route']}+conjugation", family, base, conjugator=om.fmt(y))
    if aut_splits(om.family, om.n, om.q):
        return _split_payload(om, T, family)
    return _fail_payload(om, T, family, "no construction applies")


# ---------------------------------------------------------------------------
# verification (uses only the payload)

class _Fail(Exception):
    pass


def _model_and_T(payload: dict):
    om = out_model(payload["family"], payload["n"], payload["q"])
    T = om.subgroup(om.parse(",".join(payload["T"])) if payload["T"] else [])
    if not om.is_abelian(T):
        raise _Fail("T is not abelian")
    if len(T) != payload.get("T_order"):
        raise _Fail("T order mismatch")
    return om, T


def _verify_matrix(payload, om, T):
    ctx = matrix_context(om)
    if payload.get("context") != ctx.kind or payload.get("field") != field_descriptor(ctx.f):
        raise _Fail("context or field descriptor mismatch")
    dim = matrix_dimension(om)
    words = []
    for g in payload["generators"]:
        X = decode_mat(ctx.f, g["X"])
        if X.n != dim:
            raise _Fail("matrix dimension mismatch")
        w = SemilinearWord(g["s"], g["eps"], X, ctx.graph, ctx.forder)
        ctx.check_word(w)
        words.append(w)
    comms = []
    ok = True
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            try:
                lam = word_commutator_central(words[i], words[j], ctx.center)
            except NonLinearCommutator:
                lam = None
            central = lam is not None
            ok &= central
            comms.append({"pair": [i, j], "central": central, "scalar": dlog(ctx.f, lam) if central else None})
    imgs = [ctx.rho(w) for w in words]
    return ok, comms, imgs


def _char_ctx(payload, om) -> CharContext:
    name = payload["root_system"]
    ctx = CharContext(om, name[0])
    if ctx.rs.name != name or ctx.M != payload["M"]:
        raise _Fail("root system or modulus mismatch")
    return ctx


def _verify_character(payload, om, T):
    ctx = _char_ctx(payload, om)
    words = []
    for g in payload["generators"]:
        if len(g["chi"]) != ctx.rs.n or not (0 <= g["g"] < len(om.graph_names)):
            raise _Fail("malformed character word")
        words.append(ctx.word(g["f"], g["g"], g["chi"]))
    comms = []
    ok = True
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            c = ctx.comm(words[i], words[j])
            triv = ctx.is_identity(c)
            ok &= triv
            comms.append({"pair": [i, j], "trivial": triv})
    imgs = [ctx.rho(w) for w in words]
    return ok, comms, imgs


def _verify_equation(payload, om, T):
    ctx = _char_ctx(payload, om)
    rs, M = ctx.rs, ctx.M
    order = payload["order"]
    chi = QCharacter(payload["chi"], M)
    chi_p = QCharacter(payload["chi_prime"], M)
    if len(chi.exps) != rs.n or len(chi_p.exps) != rs.n:
        raise _Fail("malformed characters")
    fpow, graph = payload["field_power"], payload["graph"]
    if graph and not ctx.perms.get(graph):
        raise _Fail("unknown graph element")
    W1 = one_minus_w_root(rs, order)
    lhs = char_compose(chi_p, W1)
    rhs = chi - ctx.act(chi, fpow, graph)
    checks = {"equation": lhs == rhs}
    if ctx.twisted:
        checks["chi_not_extendable"] = not extends_self_conjugately(rs, chi, om.q)
    else:
        checks["chi_not_extendable"] = not extends_to_P(rs, chi)
    if graph:
        P = perm_matrix(ctx.perms[graph])
        checks["w_fixed_by_graph"] = P * W1 == W1 * P
    if ctx.twisted:
        checks["chi_self_conjugate"] = self_conjugate(rs, chi, om.q)
        checks["chi_prime_self_conjugate"] = self_conjugate(rs, chi_p, om.q)
        P = perm_matrix(rs.tau)
        checks["w_fixed_by_tau"] = P * W1 == W1 * P
    if not all(checks.values()):
        return False, [{"equation": {"lhs": list(lhs.exps), "rhs": list(rhs.exps)}, "checks": checks}], []
    imgs = [om.elt(0, 0, ctx.cmap(chi)), om.elt(fpow, graph, ctx.cmap(chi_p))]
    trans = [{"equation": {"lhs": list(lhs.exps), "rhs": list(rhs.exps)}, "checks": checks}]
    return True, trans, imgs


def _verify_partial(payload, om, T):
    if om.family != "dn_even" or om.n != 4:
        raise _Fail("partial certificates exist only for D4")
    ctx = OrthoContext(om)
    if payload.get("field") != field_descriptor(ctx.f):
        raise _Fail("field descriptor mismatch")
    f, sc, lam = ctx.f, ctx.sc, ctx.lam
    A1 = decode_mat(f, payload["A1"])
    B = decode_mat(f, payload["B"])
    if A1.n != 8 or B.n != 8:
        raise _Fail("matrix dimension mismatch")
    for X in (A1, B):
        ctx.check_word(ctx.word(0, 0, X))
    M = om.q - 1
    if payload.get("M") != M:
        raise _Fail("modulus mismatch")
    xi, xi1 = QCharacter(payload["xi"], M), QCharacter(payload["xi1"], M)
    rs = root_system("D", 4)
    cmap = CharContext(om).cmap
    H = H_matrix(sc, lam)
    n1 = d2_blocks(f, lam).n1
    checks = {
        "co8_identity": mat_prod(inverse(B), mat_frob(A1, 1), B) == scale(A1, f.pow(lam, (f.p - 1) // 2)),
        "xi_rho_invariant": char_permute(xi, rs.triality) == xi,
        "xi_extends": extends_to_P(rs, xi),
        "A1_is_n1n3_H": mat_mul(A1, inverse(H)) == _assemble(sc, n1, n1),
        "H_character_is_xi1": B.is_diagonal() and torus_character(sc, H) == xi1.exps,
        "B_character_is_xi": B.is_diagonal() and torus_character(sc, B) == xi.exps,
    }
    trans = [{"checks": checks}]
    if not all(checks.values()):
        return False, trans, []
    r = om.graph_names.index("r")
    imgs = [om.elt(1, 0, cmap(xi)), om.elt(0, r, cmap(xi1))]
    return True, trans, imgs


def verify_payload(payload: dict) -> dict:
    """Independent check of a payload.  Returns the verdict fields."""
    out = {"verdict": "FAIL", "partial": False, "reason": None,
           "commutator_transcript": [], "rho_transcript": []}
    try:
        if payload.get("schema") != SCHEMA or payload.get("version") != VERSION:
            raise _Fail("unknown schema or version")
        om, T = _model_and_T(payload)
        kind = payload.get("kind")
        if kind == "none":
            raise _Fail(payload.get("reason") or "no construction")
        if kind == "split":
            crit = split_criterion(om.family, om.n, om.q)
            if not crit["splits"] or payload.get("criterion") != crit:
                raise _Fail("splitting criterion does not hold")
            out.update(verdict="PASS")
            return out
        if kind in ("conjugate", "restriction"):
            base = payload["base"]
            res = verify_payload({k: v for k, v in base.items() if k not in _VERDICT_KEYS and k != "payload_sha256"})
            if res["verdict"] != "PASS":
                raise _Fail(f"base certificate fails: {res['reason']}")
            if (base["family"], base["n"], base["q"]) != (payload["family"], payload["n"], payload["q"]):
                raise _Fail("base certificate for a different group")
            T0 = om.subgroup(om.parse(",".join(base["T"])))
            if kind == "conjugate":
                y = om.parse(payload["conjugator"])[0]
                ok = frozenset(om.conj(x, y) for x in T0) == T
                out["rho_transcript"] = [f"T0^{payload['conjugator']}"]
            else:
                ok = T <= T0
                out["rho_transcript"] = ["T <= T0"]
            if not ok:
                raise _Fail("T does not match the base target")
            out.update(verdict="PASS", partial=res["partial"])
            return out
        verifier = {"matrix": _verify_matrix, "character": _verify_character,
                    "character-equation": _verify_equation, "partial": _verify_partial}.get(kind)
        if verifier is None:
            raise _Fail(f"unknown kind {kind}")
        ok, comms, imgs = verifier(payload, om, T)
        out["commutator_transcript"] = comms
        out["rho_transcript"] = [om.fmt(x) for x in imgs]
        if not ok:
            raise _Fail("generators do not commute modulo the centre")
        if om.subgroup(imgs) != T:
            raise _Fail("outer images do not generate T")
        out.update(verdict="PASS", partial=(kind == "partial"))
    except _Fail as exc:
        out["reason"] = str(exc)
    except (KeyError, TypeError, IndexError, ValueError, ZeroDivisionError) as exc:
        out["reason"] = f"malformed certificate: {type(exc).__name__}: {exc}"
    return out


_VERDICT_KEYS = ("verdict", "partial", "reason", "commutator_transcript", "rho_transcript")


def finalize(payload: dict) -> dict:
    cert = dict(payload)
    cert.update(verify_payload(payload))
    cert["payload_sha256"] = payload_hash(cert)
    return cert


def certify(family: str, n: int, q: int, T=None, prefer: Optional[str] = None, typ: Optional[str] = None) -> dict:
    return finalize(build_payload(family, n, q, T, prefer, typ))


certify_supplement = certify


def replay(cert: dict) -> dict:
    """Re-verify a serialized certificate.  Any edit of the stored data gives FAIL."""
    if not isinstance(cert, dict):
        return {"verdict": "FAIL", "reason": "not a certificate"}
    if payload_hash(cert) != cert.get("payload_sha256"):
        return {"verdict": "FAIL", "reason": "payload hash mismatch"}
    payload = {k: v for k, v in cert.items() if k not in _VERDICT_KEYS and k != "payload_sha256"}
    res = verify_payload(payload)
    stored = {k: cert.get(k) for k in _VERDICT_KEYS}
    if canonical_json(res) != canonical_json(stored):
        return {"verdict": "FAIL", "reason": "recomputed transcript differs from the stored one"}
    return res


# ---------------------------------------------------------------------------
# mutation hook

def _mutable_slots(cert: dict, path=()):
    """(path, kind) of every generator entry that can be perturbed."""
    kind = cert.get("kind")
    if kind == "matrix":
        for gi, g in enumerate(cert["generators"]):
            for i, row in enumerate(g["X"]):
                for j in range(len(row)):
                    yield path + ("generators", gi, "X", i, j), "mat"
    elif kind == "character":
        for gi, g in enumerate(cert["generators"]):
            for i in range(len(g["chi"])):
                yield path + ("generators", gi, "chi", i), "exp"
    elif kind == "character-equation":
        for key in ("chi", "chi_prime"):
            for i in range(len(cert[key])):
                yield path + (key, i), "exp"
    elif kind == "partial":
        for key in ("A1", "B"):
            for i, row in enumerate(cert[key]):
                for j in range(len(row)):
                    yield path + (key, i, j), "mat"
        for key in ("xi", "xi1"):
            for i in range(len(cert[key])):
                yield path + (key, i), "exp"
    elif kind in ("conjugate", "restriction"):
        yield from _mutable_slots(cert["base"], path + ("base",))


def mutate_certificate(cert: dict, rng: random.Random, rehash: bool = False) -> dict:
    """A copy of cert with one generator entry perturbed.

    With ``rehash`` the hash is recomputed, so only the mathematical checks can
    catch the change.
    """
    mutant = json.loads(json.dumps(cert))
    slots = list(_mutable_slots(mutant))
    if not slots:
        raise CertifyError("certificate has no generator data to perturb")
    path, what = rng.choice(slots)
    node = mutant
    for key in path[:-1]:
        node = node[key]
    old = node[path[-1]]
    order = mutant["q"] ** 2 - 1 if mutant.get("context") == "unitary" else mutant["q"] - 1
    if what == "mat":
        choices = [None] + list(range(order))
        new = rng.choice([c for c in choices if c != old])
    else:
        M = mutant.get("M") or order
        base = mutant
        for key in path[:-2]:
            if key == "base":
                base = base["base"]
        M = base.get("M", M)
        new = (old + rng.randrange(1, M)) % M
    node[path[-1]] = new
    if rehash:
        mutant["payload_sha256"] = payload_hash(mutant)
    return mutant


# ---------------------------------------------------------------------------
# sweeps

def natural_cells(family: str, n_values: Iterable[int], q_values: Iterable[int]) -> list[tuple]:
    ns = [FIXED_RANK[family]] if family in FIXED_RANK else list(n_values)
    return [(family, n, q) for n in ns for q in q_values]


def certify_cell(cell: tuple) -> dict:
    family, n, q = cell
    entry = {"family": family, "n": n, "q": q}
    try:
        om = out_model(family, n, q)
        entry["d"] = om.d
        entry["out_order"] = om.order
        Ts = enumerate_maximal_abelian(om)
    except (OutModelError, FieldError, ValueError) as exc:
        entry["error"] = str(exc)
        entry["certificates"] = []
        return entry
    rows = []
    for T in Ts:
        try:
            cert = certify(family, n, q, T)
            rows.append({"T": cert["T"], "route": cert["route"], "kind": cert["kind"],
                         "verdict": cert["verdict"], "partial": cert["partial"],
                         "reason": cert["reason"], "payload_sha256": cert["payload_sha256"]})
        except (CertifyError, OutModelError, ValueError) as exc:
            rows.append({"T": [om.fmt(g) for g in T.generators], "route": "error", "kind": "none",
                         "verdict": "FAIL", "partial": False, "reason": str(exc), "payload_sha256": None})
    entry["certificates"] = rows
    return entry


def sweep(cells: Sequence[tuple], jobs: int = 1) -> dict:
    cells = list(cells)
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            entries = list(ex.map(certify_cell, cells))
    else:
        entries = [certify_cell(c) for c in cells]
    totals = {"cells": len(entries), "certificates": 0, "PASS": 0, "FAIL": 0, "partial": 0, "cell_errors": 0}
    for e in entries:
        if "error" in e:
            totals["cell_errors"] += 1
        for r in e["certificates"]:
            totals["certificates"] += 1
            totals[r["verdict"]] += 1
            totals["partial"] += bool(r["partial"])
    return {"schema": SWEEP_SCHEMA, "version": VERSION, "cells": entries, "totals": totals}
