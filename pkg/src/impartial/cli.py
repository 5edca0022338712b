"""Command-line experiment driver.

    impartial gen FAMILY [--n ...] [--out FILE]
    impartial alpha --instance SPEC --mechanism NAME [--trials T] [--exact]
    impartial impartiality --mechanism NAME [--cases K] [--tapes T] [--witness]
    impartial verify

Every subcommand accepts ``--config FILE`` with ``key = value`` lines; flags
given on the command line win over the file.  Exit status: 0 success,
1 invalid input, 2 invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import graph as G
from .analysis import (
    InvariantViolation,
    Mechanism,
    balanced_fraction,
    chernoff_empirical,
    exact_alpha,
    hypergeometric_tail,
    impartiality_coupling_test,
    monte_carlo_alpha,
)

EXIT_OK, EXIT_INVALID, EXIT_VIOLATION = 0, 1, 2

CSV_HEADER = ["mechanism", "n", "m", "delta", "trials", "mean", "ratio", "ci", "exact", "seed"]

FAMILIES = ("single-arc", "circulant", "tight", "complete", "uniform", "star")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- instances --------------------------------------------------------------


def make_instance(family: str, params: dict) -> G.Digraph:
    """Build a graph from a family name and string/number parameters."""
    p = dict(params)

    def take(key, conv, default=None):
        if key in p and p[key] is not None:
            return conv(p.pop(key))
        p.pop(key, None)
        if default is None:
            raise ValueError(f"family {family!r} needs parameter {key!r}")
        return default

    if family == "single-arc":
        g = G.single_arc(take("n", int, 2))
    elif family == "circulant":
        g = G.circulant_regular(take("n", int), take("N", int))
    elif family == "tight":
        g = G.tight_example(take("N", int), take("eps", float))
    elif family == "complete":
        g = G.complete_digraph(take("n", int))
    elif family == "uniform":
        g = G.uniform_digraph(take("n", int), take("p", float), take("seed", int, 0))
    elif family == "star":
        g = G.planted_star(take("delta", int))
    else:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    extra = [k for k, v in p.items() if v is not None]
    if extra:
        raise ValueError(f"family {family!r} does not take {', '.join(sorted(extra))}")
    return g


def parse_instance(spec: str) -> tuple[str, G.Digraph]:
    """``"tight:N=8,eps=0.1"`` or ``"file:path/to/graph.txt"``."""
    family, _, rest = spec.partition(":")
    family = family.strip()
    if family == "file":
        return spec, G.parse_edge_list(Path(rest).read_text())
    params = {}
    for item in filter(None, (x.strip() for x in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise ValueError(f"bad instance parameter {item!r} in {spec!r}")
        params[key.strip()] = val.strip()
    return spec, make_instance(family, params)


# -- config -----------------------------------------------------------------


def read_config(path: str | None) -> dict[str, str]:
    if not path:
        return {}
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, val = line.partition("=")
        if not eq:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        out[key.strip().replace("-", "_")] = val.strip()
    return out


@dataclass
class ExperimentConfig:
    mechanisms: list[Mechanism]
    instances: list[str] = field(default_factory=list)
    trials: int = 1000
    seed: int = 0
    jobs: int = 1
    exact: bool = False
    out: str | None = None


def _merged(args, cfg: dict, key: str, conv, default):
    val = getattr(args, key, None)
    if val is not None:
        return val
    if key in cfg:
        return conv(cfg[key])
    return default


def _bool(s) -> bool:
    if isinstance(s, bool):
        return s
    if s.lower() in ("1", "true", "yes", "on"):
        return True
    if s.lower() in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _mechanisms(args, cfg) -> list[Mechanism]:
    names = args.mechanism or [x for x in cfg.get("mechanism", "").split(",") if x.strip()]
    if not names:
        raise ValueError("no mechanism given")
    eps = _merged(args, cfg, "eps", float, None)
    c = _merged(args, cfg, "c", int, None)
    mechs = []
    for name in names:
        for part in name.split(","):
            part = part.strip()
            mechs.append(Mechanism(
                part,
                eps=eps if part.startswith("slicing") else None,
                c=(c or 1) if part == "slicing-multi" else 1,
            ))
    return mechs


def alpha_config(args, cfg) -> ExperimentConfig:
    instances = list(args.instance or [])
    instances += [f"file:{p}" for p in (args.graph or [])]
    if not instances:
        instances = [x.strip() for x in cfg.get("instance", "").split(";") if x.strip()]
        instances += [f"file:{x.strip()}" for x in cfg.get("graph", "").split(";") if x.strip()]
    if not instances:
        raise ValueError("no instance given (use --instance or --graph)")
    conf = ExperimentConfig(
        mechanisms=_mechanisms(args, cfg),
        instances=instances,
        trials=_merged(args, cfg, "trials", int, 1000),
        seed=_merged(args, cfg, "seed", int, 0),
        jobs=_merged(args, cfg, "jobs", int, 1),
        exact=_merged(args, cfg, "exact", _bool, False),
        out=_merged(args, cfg, "out", str, None),
    )
    if conf.trials < 1:
        raise ValueError(f"trials must be >= 1, got {conf.trials}")
    return conf


# -- output helpers ---------------------------------------------------------


def _fmt(x) -> str:
    return f"{float(x):.6g}"


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# -- subcommands ------------------------------------------------------------


def cmd_gen(args, cfg) -> int:
    family = args.family
    params = {
        "n": _merged(args, cfg, "n", int, None),
        "N": _merged(args, cfg, "N", int, None),
        "eps": _merged(args, cfg, "eps", float, None),
        "p": _merged(args, cfg, "p", float, None),
        "seed": _merged(args, cfg, "seed", int, None),
        "delta": _merged(args, cfg, "delta", int, None),
    }
    g = make_instance(family, params)
    out = _merged(args, cfg, "out", str, None)
    summary = f"n={g.n} m={g.m} delta={G.max_in_degree(g)}\n"
    _write(G.emit_edge_list(g), out)
    (sys.stdout if out else sys.stderr).write(summary)
    return EXIT_OK


def run_alpha(conf: ExperimentConfig) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for spec in conf.instances:
        _, g = parse_instance(spec)
        for mech in conf.mechanisms:
            if conf.exact:
                est = exact_alpha(mech, g)
            else:
                est = monte_carlo_alpha(mech, g, conf.trials, conf.seed, jobs=conf.jobs)
            w.writerow([
                mech.label, g.n, g.m, est.delta, est.trials,
                _fmt(est.exact_mean if est.exact else est.mean_winner_degree),
                _fmt(est.ratio), _fmt(est.ci_halfwidth),
                "true" if est.exact else "false", conf.seed,
            ])
    return buf.getvalue()


def cmd_alpha(args, cfg) -> int:
    conf = alpha_config(args, cfg)
    _write(run_alpha(conf), conf.out)
    return EXIT_OK


def random_cases(k: int, seed: int):
    """``k`` reproducible (graph, vertex, new out-neighbourhood) triples, n in [2, 8]."""
    for j in range(k):
        rng = np.random.default_rng([seed, j])
        n = int(rng.integers(2, 9))
        p = float(rng.choice([0.2, 0.5, 0.8]))
        g = G.uniform_digraph(n, p, seed=int(rng.integers(2**31)))
        v = int(rng.integers(n))
        others = [u for u in range(n) if u != v]
        new_out = [u for u in others if rng.random() < 0.5]
        yield g, v, new_out


def cmd_impartiality(args, cfg) -> int:
    mechs = _mechanisms(args, cfg)
    seed = _merged(args, cfg, "seed", int, 0)
    tapes = _merged(args, cfg, "tapes", int, 1000)
    cases = _merged(args, cfg, "cases", int, 100)
    witness = _merged(args, cfg, "witness", _bool, False)
    out = _merged(args, cfg, "out", str, None)
    if tapes < 1 or cases < 1:
        raise ValueError("tapes and cases must be >= 1")
    if witness:
        case_list = [(G.single_arc(2), 1, [0])]
    else:
        case_list = list(random_cases(cases, seed))

    status = EXIT_OK
    summary, details = [], []
    for mech in mechs:
        violations = trace_bad = 0
        for j, (g, v, new_out) in enumerate(case_list):
            seeds = range(seed + j * tapes, seed + (j + 1) * tapes)
            rep = impartiality_coupling_test(mech, g, v, new_out, seeds)
            violations += len(rep.violations)
            trace_bad += len(rep.trace_violations)
            for s, vv, a, b in rep.violations:
                details.append(f"{mech.label} case={j} seed={s} vertex={vv} original={a} modified={b}")
        summary.append(f"mechanism={mech.label} cases={len(case_list)} violations={violations}")
        if mech.impartial:
            summary.append(f"mechanism={mech.label} trace_violations={trace_bad}")
            if violations or trace_bad:
                status = EXIT_VIOLATION
    sys.stdout.write("\n".join(summary) + "\n")
    if out:
        Path(out).write_text("\n".join(summary + details) + "\n")
    return status


VERIFY_DEFAULTS = {
    "balanced_fraction": dict(n=1000, delta=100, eps=0.2, trials=10_000),
    "hypergeometric_tail": dict(n=1000, delta=100, k=300, eps1=0.1, trials=100_000),
    "chernoff_empirical": dict(n=1000, p=0.5, delta=0.2, trials=100_000),
}


def run_verify(seed: int, trials: int | None = None) -> list[tuple[str, bool]]:
    rows = []

    def params(name):
        d = dict(VERIFY_DEFAULTS[name])
        if trials:
            d["trials"] = trials
        return d

    p = params("balanced_fraction")
    val = balanced_fraction(seed=seed, **p)
    rows.append((f"check=balanced_fraction value={_fmt(val)} threshold=0.8 pass={str(val >= 0.8).lower()}",
                 val >= 0.8))
    p = params("hypergeometric_tail")
    val = hypergeometric_tail(seed=seed, **p)
    rows.append((f"check=hypergeometric_tail value={_fmt(val)} threshold=0.1 pass={str(val < 0.1).lower()}",
                 val < 0.1))
    p = params("chernoff_empirical")
    emp, bound = chernoff_empirical(seed=seed, **p)
    rows.append((f"check=chernoff_empirical value={_fmt(emp)} bound={_fmt(bound)} pass={str(emp <= bound).lower()}",
                 emp <= bound))
    return rows


def cmd_verify(args, cfg) -> int:
    seed = _merged(args, cfg, "seed", int, 0)
    trials = _merged(args, cfg, "trials", int, None)
    rows = run_verify(seed, trials)
    _write("".join(line + "\n" for line, _ in rows), _merged(args, cfg, "out", str, None))
    return EXIT_OK if all(ok for _, ok in rows) else EXIT_VIOLATION


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="impartial", description="Impartial selection experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="key = value file; flags override it")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output path (default: stdout)")

    p = sub.add_parser("gen", help="write a generated instance as an edge list")
    p.add_argument("family", choices=FAMILIES)
    common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--N", type=int, dest="N")
    p.add_argument("--eps", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--delta", type=int)

    def mech_args(p):
        p.add_argument("--mechanism", action="append",
                       help="permutation, two-partition, slicing, slicing-multi or baseline; repeatable")
        p.add_argument("--eps", type=float, help="sampling rate for the slicing mechanisms")
        p.add_argument("--c", type=int, help="number of winners for slicing-multi")

    p = sub.add_parser("alpha", help="estimate E[winner degree] / Delta, CSV output")
    common(p)
    mech_args(p)
    p.add_argument("--instance", action="append", help='e.g. "tight:N=8,eps=0.1"; repeatable')
    p.add_argument("--graph", action="append", help="edge-list file; repeatable")
    p.add_argument("--trials", type=int)
    p.add_argument("--jobs", type=int, help="worker processes; does not change the output")
    p.add_argument("--exact", action="store_const", const=True,
                   help="use the exhaustive oracle instead of sampling")

    p = sub.add_parser("impartiality", help="coupling test over randomized perturbations")
    common(p)
    mech_args(p)
    p.add_argument("--cases", type=int)
    p.add_argument("--tapes", type=int, help="tapes per case")
    p.add_argument("--witness", action="store_const", const=True,
                   help="use the 2-vertex single-arc witness instead of random cases")

    p = sub.add_parser("verify", help="run the concentration checkers")
    common(p)
    p.add_argument("--trials", type=int, help="override every checker's trial count")
    return parser


COMMANDS = {
    "gen": cmd_gen,
    "alpha": cmd_alpha,
    "impartiality": cmd_impartiality,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = read_config(args.config)
        return COMMANDS[args.command](args, cfg)
    except InvariantViolation as e:
        print(f"invariant violation: {e}", file=sys.stderr)
        return EXIT_VIOLATION
    except (UsageError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
