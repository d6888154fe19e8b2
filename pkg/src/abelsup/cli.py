"""Command-line driver: enumerate, construct, certify, sweep."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Optional

from .certify import (
    CertifyError,
    build_payload,
    canonical_json,
    certify,
    natural_cells,
    replay,
    sweep,
)
from .field import DEFAULT_TABLE_BOUND, FieldError, prime_power
from .lattice import LatticeError
from .outgroup import FAMILIES, OutModelError, enumerate_maximal_abelian, out_model

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

MIN_RANK = {"psl": 2, "psu": 3, "dn_odd": 3, "dn_even": 4, "bc": 2, "2dn": 4}

# desk-scale default sweep: (family, n values, q values)
DEFAULT_SWEEP = (
    ("psl", range(2, 7), (4, 5, 7, 8, 9, 11, 13, 16, 25, 27)),
    ("psu", range(3, 6), (3, 5, 7, 9)),
    ("dn_odd", (3, 5), (9, 25)),
    ("dn_even", (4, 6), (9, 25)),
    ("bc", (2, 3), (9, 25)),
    ("e7", (7,), (9, 25)),
    ("e6", (6,), (13, 25, 64, 343)),
    ("2e6", (6,), (8,)),
    ("2dn", (4,), (3,)),
)


class UsageError(ValueError):
    pass


@dataclass
class CliConfig:
    subcommand: str
    family: Optional[list] = None
    n: Optional[int] = None
    q: Optional[int] = None
    t: Optional[str] = None
    fmt: str = "human"
    max_n: Optional[int] = None
    q_list: Optional[list] = None
    jobs: int = 1
    table_bound: int = DEFAULT_TABLE_BOUND
    prefer: Optional[str] = None
    typ: Optional[str] = None
    replay: Optional[str] = None
    extra: dict = field(default_factory=dict)


def _parse_qlist(s: str) -> list[int]:
    out = []
    for tok in s.replace(" ", "").split(","):
        if not tok:
            continue
        try:
            out.append(int(tok))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad q value {tok!r}") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="abelsup", description="Abelian supplements of outer automorphism groups")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def common(p, cell=True):
        p.add_argument("--format", dest="fmt", choices=("human", "json"), default="human")
        p.add_argument("--field-table-bound", dest="table_bound", type=int, default=DEFAULT_TABLE_BOUND)
        if cell:
            p.add_argument("--family", required=False)
            p.add_argument("-n", type=int)
            p.add_argument("-q", type=int)

    p = sub.add_parser("enumerate", help="list Out(G0) and its maximal abelian subgroups")
    common(p)
    for name in ("construct", "certify"):
        p = sub.add_parser(name, help=f"{name} a supplement for one T")
        common(p)
        p.add_argument("--t", help="index into the enumeration or a generator expression such as 'd^2,f*t'")
        p.add_argument("--prefer", choices=("chevalley",), help="use the character construction when it applies")
        p.add_argument("--type", dest="typ", choices=("B", "C"), help="root system type for the bc family")
        if name == "certify":
            p.add_argument("--replay", metavar="FILE", help="re-verify a stored certificate")
    p = sub.add_parser("sweep", help="certify every maximal abelian T over a range")
    common(p, cell=False)
    p.add_argument("--family", help="comma-separated families (default: desk-scale set)")
    p.add_argument("--max-n", dest="max_n", type=int)
    p.add_argument("--q-list", dest="q_list", type=_parse_qlist)
    p.add_argument("--jobs", type=int, default=1)
    return ap


def config_from_args(ns) -> CliConfig:
    cfg = CliConfig(subcommand=ns.subcommand, fmt=ns.fmt, table_bound=ns.table_bound)
    fam = getattr(ns, "family", None)
    cfg.family = [f for f in fam.split(",") if f] if fam else None
    for key in ("n", "q", "t", "max_n", "q_list", "prefer", "typ", "replay"):
        setattr(cfg, key, getattr(ns, key, None))
    cfg.jobs = getattr(ns, "jobs", 1)
    validate(cfg)
    return cfg


def _check_q(q: int, family: str, bound: int) -> None:
    try:
        prime_power(q)
    except FieldError as exc:
        raise UsageError(str(exc)) from None
    need = q * q if family in ("psu", "2e6", "2dn") else q
    if need > bound:
        raise UsageError(f"field of order {need} exceeds the table bound {bound}")


def validate(cfg: CliConfig) -> None:
    if cfg.table_bound < 2:
        raise UsageError("table bound must be at least 2")
    if cfg.family:
        for f in cfg.family:
            if f not in FAMILIES:
                raise UsageError(f"unsupported family {f!r}; choose from {', '.join(FAMILIES)}")
    if cfg.subcommand == "sweep":
        if cfg.jobs < 1:
            raise UsageError("--jobs must be positive")
        if cfg.max_n is not None and cfg.max_n < 1:
            raise UsageError("--max-n must be positive")
        for f in cfg.family or ():
            for q in cfg.q_list or ():
                _check_q(q, f, cfg.table_bound)
        return
    if cfg.subcommand == "certify" and cfg.replay:
        return
    if not cfg.family or len(cfg.family) != 1:
        raise UsageError("--family must name exactly one family")
    fam = cfg.family[0]
    if cfg.q is None:
        raise UsageError("-q is required")
    if cfg.n is None:
        if fam in ("e6", "2e6", "e7", "d4"):
            cfg.n = {"e6": 6, "2e6": 6, "e7": 7, "d4": 4}[fam]
        else:
            raise UsageError("-n is required")
    _check_q(cfg.q, fam, cfg.table_bound)


def _selector(t: Optional[str]):
    if t is None:
        return None
    return int(t) if t.strip().isdigit() else t


def _emit(obj, fmt, human) -> None:
    if fmt == "json":
        print(json.dumps(obj, sort_keys=True, indent=2))
    else:
        print(human)


def cmd_enumerate(cfg: CliConfig) -> int:
    om = out_model(cfg.family[0], cfg.n, cfg.q)
    Ts = enumerate_maximal_abelian(om)
    obj = {
        "family": cfg.family[0], "n": om.n, "q": om.q, "d": om.d, "out_order": om.order,
        "abelian": om.is_abelian(om.elements), "relations": list(om.relations),
        "maximal_abelian": [{"index": i, "generators": [om.fmt(g) for g in T.generators],
                             "order": len(T.elements), "cyclic": om.is_cyclic(T.elements)}
                            for i, T in enumerate(Ts)],
    }
    lines = [f"{cfg.family[0]} n={om.n} q={om.q}: d = {om.d}, |Out| = {om.order}",
             "relations: " + ("; ".join(om.relations) or "(none)"),
             f"{len(Ts)} maximal abelian subgroup(s):"]
    lines += [f"  [{i}] {T.label(om)}  order {len(T.elements)}" for i, T in enumerate(Ts)]
    _emit(obj, cfg.fmt, "\n".join(lines))
    return EXIT_OK


def _human_cert(c: dict) -> str:
    lines = [f"{c['verdict']}{' (partial)' if c.get('partial') else ''}: {c['family']} n={c['n']} q={c['q']} "
             f"T=<{', '.join(c['T'])}> route={c['route']} kind={c['kind']}"]
    if c.get("rho_transcript"):
        lines.append("  outer images: " + ", ".join(c["rho_transcript"]))
    if c.get("reason"):
        lines.append("  reason: " + c["reason"])
    return "\n".join(lines)


def cmd_construct(cfg: CliConfig) -> int:
    payload = build_payload(cfg.family[0], cfg.n, cfg.q, _selector(cfg.t), cfg.prefer, cfg.typ)
    human = f"{payload['family']} n={payload['n']} q={payload['q']} T=<{', '.join(payload['T'])}> " \
            f"route={payload['route']} kind={payload['kind']}"
    _emit(payload, cfg.fmt, human)
    return EXIT_OK if payload["kind"] != "none" else EXIT_FAIL


def cmd_certify(cfg: CliConfig) -> int:
    if cfg.replay:
        try:
            with open(cfg.replay) as fh:
                cert = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read certificate: {exc}") from None
        res = replay(cert)
        human = f"replay {res['verdict']}" + (f": {res['reason']}" if res.get("reason") else "")
        _emit(res, cfg.fmt, human)
        return EXIT_OK if res["verdict"] == "PASS" else EXIT_FAIL
    cert = certify(cfg.family[0], cfg.n, cfg.q, _selector(cfg.t), cfg.prefer, cfg.typ)
    _emit(cert, cfg.fmt, _human_cert(cert))
    return EXIT_OK if cert["verdict"] == "PASS" else EXIT_FAIL


def sweep_cells(cfg: CliConfig) -> list[tuple]:
    if cfg.family is None and cfg.max_n is None and cfg.q_list is None:
        plan = DEFAULT_SWEEP
    else:
        fams = cfg.family or [f for f, _, _ in DEFAULT_SWEEP]
        defaults = {f: (ns, qs) for f, ns, qs in DEFAULT_SWEEP}
        plan = []
        for f in fams:
            ns, qs = defaults.get(f, ((MIN_RANK.get(f, 2),), (9,)))
            if cfg.max_n is not None:
                lo = MIN_RANK.get(f, 1)
                ns = [n for n in range(lo, cfg.max_n + 1)
                      if not (f == "dn_odd" and n % 2 == 0) and not (f == "dn_even" and n % 2)]
            plan.append((f, ns, cfg.q_list if cfg.q_list is not None else qs))
    cells = []
    for f, ns, qs in plan:
        cells += natural_cells(f, ns, qs)
    return cells


def cmd_sweep(cfg: CliConfig) -> int:
    report = sweep(sweep_cells(cfg), cfg.jobs)
    t = report["totals"]
    lines = []
    for e in report["cells"]:
        head = f"{e['family']} n={e['n']} q={e['q']}"
        if "error" in e:
            lines.append(f"{head}: ERROR {e['error']}")
            continue
        for r in e["certificates"]:
            tag = " (partial)" if r["partial"] else ""
            lines.append(f"{head} <{', '.join(r['T'])}> {r['route']}: {r['verdict']}{tag}")
    lines.append(f"totals: {t['certificates']} certificates in {t['cells']} cells, "
                 f"{t['PASS']} PASS, {t['FAIL']} FAIL, {t['partial']} partial, {t['cell_errors']} cell errors")
    if cfg.fmt == "json":
        print(canonical_json(report))
    else:
        print("\n".join(lines))
    return EXIT_FAIL if t["FAIL"] or t["cell_errors"] else EXIT_OK


COMMANDS = {"enumerate": cmd_enumerate, "construct": cmd_construct, "certify": cmd_certify, "sweep": cmd_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.subcommand](cfg)
    except (UsageError, OutModelError, FieldError, CertifyError, LatticeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
