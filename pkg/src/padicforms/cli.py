"""Command-line driver.

Every subcommand prints a short human summary and, with ``--out``, writes a
JSON report (sorted keys, no timings) so that identical inputs give
byte-identical files. Exit status: 0 certified, 2 Unknown, 1 error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from . import __version__
from .errors import PadicFormsError
from .forms import as_form, builtin_form, parse_form, read_forms

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNKNOWN = 2


@dataclass
class RunConfig:
    command: str
    p: int | None = None
    precision: int = 32
    level_max: int = 8
    budget: int | None = None
    seed: int = 0
    jobs: int = 1
    form: str | None = None
    file: str | None = None
    out: str | None = None
    extra: dict = field(default_factory=dict)

    def validate(self):
        if self.precision < 1:
            raise ValueError("--prec must be at least 1")
        if self.level_max < 1:
            raise ValueError("--level-max must be at least 1")
        if self.budget is not None and self.budget < 1:
            raise ValueError("--budget must be positive")
        if self.jobs < 1:
            raise ValueError("--jobs must be at least 1")


def _emit(cfg: RunConfig, doc: dict):
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, sort_keys=True, indent=2)
            fh.write("\n")


def _require_p(cfg: RunConfig) -> int:
    if cfg.p is None:
        raise ValueError("--p is required")
    return cfg.p


def _read_text(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load_form(cfg: RunConfig):
    if cfg.form and cfg.file:
        raise ValueError("give --form or --file, not both")
    if cfg.form:
        try:
            return builtin_form(cfg.form)
        except KeyError:
            return parse_form(cfg.form)
    if cfg.file:
        forms = read_forms(_read_text(cfg.file))
        if len(forms) != 1:
            raise ValueError(f"expected one form in {cfg.file}, found {len(forms)}")
        return forms[0]
    raise ValueError("a form is required (--form or --file)")


def _kind_status(kind: str) -> int:
    return EXIT_UNKNOWN if kind == "unknown" else EXIT_OK


# ---------------------------------------------------------------------------
# subcommands


def cmd_solve(cfg: RunConfig) -> int:
    from .search import DEFAULT_BUDGET, SolveOptions, solve

    p = _require_p(cfg)
    f = _load_form(cfg)
    opt = SolveOptions(
        precision=cfg.precision,
        level_max=cfg.level_max,
        budget=cfg.budget or DEFAULT_BUDGET,
        seed=cfg.seed,
        jobs=cfg.jobs,
    )
    cert = solve(f, p, opt)
    doc = cert.to_json()
    if cert.kind == "soluble":
        print(f"soluble over Q_{p}: zero mod {p}^{cert.precision} from a level {cert.level} seed")
    elif cert.kind == "insoluble":
        print(f"insoluble over Q_{p}: no primitive zero mod {p}^{cert.level} ({cert.method})")
    else:
        print(f"unknown: {cert.reason}")
    _emit(cfg, doc)
    return _kind_status(cert.kind)


def cmd_terjanian(cfg: RunConfig) -> int:
    from .search import certify_insoluble, value_distribution

    F = builtin_form("terjanian-F")
    m = 4
    cert = certify_insoluble(F, 2, m, jobs=cfg.jobs)
    if not cert:
        print(f"refuted: primitive zero {cert.vector} mod 2^{m}")
        return EXIT_ERROR
    zeros = cert.ledger["primitive_zeros"]
    print(f"insoluble, level {cert.modulus}, primitive zeros = {zeros}")
    doc = cert.to_json()
    mod4 = []
    for i, b in enumerate(F.blocks):
        h = value_distribution(b.form, 2, 2)
        counts = {v: int(c) for v, c in enumerate(h.all) if c}
        mod4.append({str(v): c for v, c in counts.items()})
        print(f"block {i + 1} (weight {b.weight}) G mod 4: " + ", ".join(f"{v}: {c}" for v, c in counts.items()))
    for i, h in enumerate(cert.histograms):
        line = ", ".join(f"{v}: {int(c)}" for v, c in enumerate(h.all) if c)
        print(f"block {i + 1} weighted mod {h.modulus}: {line}")
    doc["histograms_G_mod_4"] = mod4
    _emit(cfg, doc)
    return EXIT_OK


def _read_systems(path: str, p: int):
    from .quad import QuadSystem

    groups, cur = [], []
    for line in _read_text(path).splitlines() + [""]:
        if line.strip():
            cur.append(line)
        elif cur:
            groups.append(read_forms("\n".join(cur)))
            cur = []
    return [QuadSystem.of(g, p) for g in groups if g]


def cmd_count2(cfg: RunConfig) -> int:
    from .quad import count_bound_harness, verify_count_bound
    from .search import SCHEMA_VERSION

    p = _require_p(cfg)
    if cfg.file:
        reports = [verify_count_bound(s) for s in _read_systems(cfg.file, p)]
        doc = {
            "schema_version": SCHEMA_VERSION,
            "p": p,
            "held": sum(r.holds for r in reports),
            "trials": len(reports),
            "reports": [r.to_json() for r in reports],
        }
    else:
        trials = cfg.extra.get("random") or 100
        doc = count_bound_harness([p], trials, cfg.seed, cfg.extra.get("r", 2), cfg.extra.get("n", 6))
    print(f"bound held: {doc['held']}/{doc['trials']}")
    _emit(cfg, doc)
    return EXIT_OK if doc["held"] == doc["trials"] else EXIT_ERROR


def cmd_diagonal(cfg: RunConfig) -> int:
    from .diagonal import DiagonalInstance, dl_property_harness, solve_diagonal
    from .search import DEFAULT_BUDGET, SolveOptions

    p = _require_p(cfg)
    d = cfg.extra.get("d")
    if d is None:
        raise ValueError("--d is required")
    trials = cfg.extra.get("random")
    if trials:
        doc = dl_property_harness(d, p, trials, cfg.seed, cfg.jobs)
        print(f"certified soluble: {doc['soluble']}/{doc['trials']} (d={d}, p={p}, m={doc['m']})")
        _emit(cfg, doc)
        return EXIT_OK if doc["soluble"] == trials else EXIT_UNKNOWN
    raw = cfg.extra.get("coeffs")
    if not raw:
        raise ValueError("give --coeffs or --random")
    coeffs = tuple(int(c) for c in raw.split(","))
    opt = SolveOptions(precision=cfg.precision, budget=cfg.budget or DEFAULT_BUDGET, seed=cfg.seed, jobs=cfg.jobs)
    cert = solve_diagonal(DiagonalInstance(coeffs, d, p), options=opt)
    print(f"{cert.kind} (level {getattr(cert, 'level', '-')})")
    _emit(cfg, cert.to_json())
    return _kind_status(cert.kind)


def cmd_isotropy(cfg: RunConfig) -> int:
    from .quad import isotropic_qp, witness_reverifies

    p = _require_p(cfg)
    f = as_form(_load_form(cfg))
    if f.d != 2:
        raise ValueError("isotropy needs a quadratic form")
    res = isotropic_qp(f, p, precision=cfg.precision)
    doc = res.to_json()
    doc["form"] = str(f)
    doc["n"] = f.n
    if res.isotropic:
        ok = witness_reverifies(f, res)
        print(f"isotropic over Q_{p}; witness {'re-verified' if ok else 'missing'} ({res.witness_flag})")
        status = EXIT_OK if ok else EXIT_UNKNOWN
    else:
        print(f"anisotropic over Q_{p}")
        status = EXIT_OK
    _emit(cfg, doc)
    return status


def cmd_quartic_scan(cfg: RunConfig) -> int:
    from .search import DEFAULT_BUDGET, SolveOptions, quartic_lemma_scan

    p = _require_p(cfg)
    opt = SolveOptions(budget=cfg.budget or DEFAULT_BUDGET, level_max=cfg.level_max, seed=cfg.seed, jobs=cfg.jobs)
    rep = quartic_lemma_scan(p, options=opt)
    doc = rep.to_json()
    c = doc["counts"]
    print(f"p={p}: {c['soluble']}/{rep.total} soluble, {c['insoluble']} insoluble, {c['unknown']} unknown")
    _emit(cfg, doc)
    return EXIT_UNKNOWN if c["unknown"] else EXIT_OK


def cmd_leep(cfg: RunConfig) -> int:
    import numpy as np

    from .leep import choose_min_D, parse_ff_file, pipeline, pipeline_harness, random_pencil, reduce

    p = _require_p(cfg)
    trials = cfg.extra.get("random")
    if trials:
        doc = pipeline_harness(trials, cfg.seed, p=p, K=cfg.precision)
        print(f"verified: {doc['verified']}/{trials} (n={doc['n']}, k=1, d=1, p={p}, mod {p}^{cfg.precision})")
        _emit(cfg, doc)
        return EXIT_OK if doc["verified"] == trials else EXIT_UNKNOWN
    if cfg.file:
        q = parse_ff_file(_read_text(cfg.file))
    else:
        q = random_pencil(np.random.default_rng(cfg.seed), 9, p * p)
    D = cfg.extra.get("D")
    if D is None:
        D = choose_min_D(q.n, q.d, q.k)
        if D is None:
            print(f"no feasible D for n={q.n}, d={q.d}, k={q.k}")
            _emit(cfg, {"status": "no-feasible-D", "n": q.n, "d": q.d, "k": q.k})
            return EXIT_UNKNOWN
    red = reduce(q, D, p)
    res = pipeline(q, p, D=D, K=cfg.precision, budget=cfg.budget, seed=cfg.seed)
    doc = {"reduction": red.to_json(), "result": res}
    print(f"D={D}, N={red.N}, R={red.R}: {res['status']}")
    _emit(cfg, doc)
    return EXIT_OK if res["status"] == "verified" else EXIT_UNKNOWN


def cmd_selftest(cfg: RunConfig) -> int:
    from .oracles import hilbert_oracle_suite, split_oracle_suite
    from .search import SCHEMA_VERSION

    trials = cfg.extra.get("random") or 200
    a = split_oracle_suite(trials, cfg.seed)
    b = hilbert_oracle_suite(max(1, trials // 2), cfg.seed)
    for s in (a, b):
        print(f"{s['suite']}: {s['trials'] - len(s['mismatches'])}/{s['trials']} agree")
    _emit(cfg, {"schema_version": SCHEMA_VERSION, "suites": [a, b]})
    return EXIT_OK if not (a["mismatches"] or b["mismatches"]) else EXIT_ERROR


def cmd_verify(cfg: RunConfig) -> int:
    from .verify import verify_document

    if not cfg.file:
        raise ValueError("--file with a certificate is required")
    doc = json.loads(_read_text(cfg.file))
    verdict = verify_document(doc)
    for c in verdict.checks:
        print(f"[{'ok' if c['passed'] else 'FAIL'}] {c['check']}")
    print("certificate verified" if verdict.ok else "certificate REJECTED")
    _emit(cfg, verdict.to_json())
    return EXIT_OK if verdict.ok else EXIT_ERROR


COMMANDS = {
    "solve": cmd_solve,
    "terjanian": cmd_terjanian,
    "count2": cmd_count2,
    "diagonal": cmd_diagonal,
    "isotropy": cmd_isotropy,
    "quartic-scan": cmd_quartic_scan,
    "leep": cmd_leep,
    "selftest": cmd_selftest,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, help="the prime")
    common.add_argument("--prec", type=int, default=32, help="target p-adic precision K (default 32)")
    common.add_argument("--level-max", type=int, default=8, help="highest search level (default 8)")
    common.add_argument("--budget", type=int, help="vectors evaluated per level before giving up")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--form", help="form text or a builtin name")
    common.add_argument("--file", help="input file")
    common.add_argument("--out", help="write the JSON report here")
    common.add_argument("--jobs", type=int, default=1, help="worker threads")

    parser = argparse.ArgumentParser(prog="padicforms", description="p-adic solubility of forms with certificates")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "solve": "decide Q_p-solubility of one form",
        "terjanian": "certify that the 18-variable Terjanian form has no 2-adic zero",
        "count2": "check the zero-count bound for quadratic systems over F_p",
        "diagonal": "solve a diagonal form, or run the random-instance harness",
        "isotropy": "decide isotropy of a quadratic form over Q_p",
        "quartic-scan": "solve every quartic H with coefficients mod p",
        "leep": "reduce a form over Q_p(t) to a quadratic system and solve it",
        "selftest": "run the oracle-equivalence suites",
        "verify": "independently re-check a certificate file",
    }
    subs = {name: sub.add_parser(name, parents=[common], help=h) for name, h in helps.items()}
    for name in ("count2", "diagonal", "leep", "selftest"):
        subs[name].add_argument("--random", type=int, help="number of seeded random instances")
    subs["count2"].add_argument("--r", type=int, default=2, help="largest number of forms")
    subs["count2"].add_argument("--n", type=int, default=6, help="largest number of variables")
    subs["diagonal"].add_argument("--d", type=int, help="degree")
    subs["diagonal"].add_argument("--coeffs", help="comma-separated coefficients")
    subs["leep"].add_argument("--D", type=int, help="substitution degree (default: least feasible)")
    return parser


_EXTRA = ("random", "r", "n", "d", "coeffs", "D")


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    extra = {k: getattr(ns, k) for k in _EXTRA if getattr(ns, k, None) is not None}
    cfg = RunConfig(
        command=ns.command,
        p=ns.p,
        precision=ns.prec,
        level_max=ns.level_max,
        budget=ns.budget,
        seed=ns.seed,
        jobs=ns.jobs,
        form=ns.form,
        file=ns.file,
        out=ns.out,
        extra=extra,
    )
    cfg.validate()
    return cfg


def run(cfg: RunConfig) -> int:
    try:
        return COMMANDS[cfg.command](cfg)
    except (PadicFormsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except ValueError as exc:
        parser.error(str(exc))
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
