"""``qbnet`` command line.

Exit codes: 0 success, 1 unreadable input (file, literal, expression,
recipe), 2 a net or state that fails validation, 3 a numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import errors
from .checks import SUITES
from .density import h_rho, matrix_dump, s_entropy
from .fileio import (
    format_ensemble,
    format_net,
    format_pom,
    parse_complex,
    parse_ensemble,
    read_net,
)
from .infotheory import (
    SearchTrace,
    channel,
    double_trine_ensemble,
    holevo,
    maximize_accessible_info,
    mutual_info,
    trine_ensemble,
    trine_product_pom,
)
from .measure import trine_pom
from .netcore import validate
from .protocols import (
    dense_coding_net,
    epr_net,
    eraser_net,
    sys_env_net,
    teleport_net,
    two_mixtures_net,
)
from .qprob import p_gamma, p_gamma_cond
from .recipe import parse_recipe
from .report import fmt

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3

_PARSE_ERRORS = (
    errors.FileFormatError,
    errors.ExpressionSyntaxError,
    errors.EmptyExpression,
    errors.UnknownAxis,
    errors.EmptyGamma,
    errors.EmptyResult,
    OSError,
)
_INVALID_ERRORS = (
    errors.NetStructureError,
    errors.DimensionMismatch,
    errors.NotNormalized,
    errors.NotHermitian,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; here 2 means "invalid net"
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _out(line: str = "") -> None:
    sys.stdout.write(line + "\n")


def _names(text: str) -> list[str]:
    return [s.strip() for s in text.split(",") if s.strip()]


def _assignments(text: str) -> dict[str, int]:
    out = {}
    for item in _names(text):
        name, sep, value = item.partition("=")
        if not sep or not value.strip().isdigit():
            raise errors.FileFormatError(f"expected name=state, got {item!r}")
        out[name.strip()] = int(value)
    return out


def _alpha(text: str | None):
    if text is None:
        return None
    return np.array([parse_complex(t.strip()) for t in text.split(",")], dtype=complex)


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


# commands ------------------------------------------------------------------


def cmd_validate(args) -> int:
    net = read_net(args.file)
    rep = validate(net)
    if rep.ok:
        _out(f"ok: {len(net.names)} nodes")
        return EXIT_OK
    for v in rep.violations:
        _out(f"INVALID {v}")
    return EXIT_INVALID


def cmd_entropy(args) -> int:
    rho = parse_recipe(args.recipe).apply(read_net(args.file))
    fn = s_entropy if args.kind == "S" else h_rho
    _out(fmt(fn(rho, args.expr)))
    return EXIT_OK


def cmd_probs(args) -> int:
    net = read_net(args.file)
    gamma = _names(args.gamma)
    if args.given:
        given = _assignments(args.given)
        table = p_gamma_cond(net, gamma, list(given), given)
    else:
        table = p_gamma(net, gamma)
    sys.stdout.write(table.dump())
    return EXIT_OK


def cmd_reduce(args) -> int:
    rho = parse_recipe(args.recipe).apply(read_net(args.file))
    if args.out == "matrix":
        _out("# axes: " + " ".join(f"{a.node}:{a.dim}" for a in rho.axes))
        sys.stdout.write(matrix_dump(rho.data))
    else:
        for idx, p in np.ndenumerate(rho.diagonal().real.reshape(rho.dims)):
            _out("\t".join(str(i) for i in idx) + "\t" + fmt(p))
    return EXIT_OK


def cmd_holevo(args) -> int:
    _out(f"chi\t{fmt(holevo(parse_ensemble(_read(args.file))))}")
    return EXIT_OK


def cmd_accinfo(args) -> int:
    e = parse_ensemble(_read(args.file))
    trace = SearchTrace()
    _, best = maximize_accessible_info(e, args.outcomes, restarts=args.restarts, seed=args.seed, trace=trace)
    for i, v in enumerate(trace.restart_values):
        _out(f"restart {i}\t{fmt(v)}")
    _out(f"chi\t{fmt(holevo(e))}")
    _out(f"best\t{fmt(best)}")
    return EXIT_OK


def cmd_check(args) -> int:
    suite = SUITES[args.suite]
    kwargs = {"seed": args.seed}
    if args.trials is not None:
        kwargs["trials"] = args.trials
    rep = suite(**kwargs)
    for c in rep.checks:
        _out(str(c))
    _out(f"{len(rep.checks) - len(rep.failures())}/{len(rep.checks)} passed")
    return EXIT_OK if rep.ok else EXIT_INVALID


def _fixture(name: str, args):
    alpha = _alpha(getattr(args, "alpha", None))
    seed = getattr(args, "seed", 0)
    if name == "epr":
        return epr_net()
    if name == "eraser":
        return eraser_net()
    if name == "teleport":
        return teleport_net(alpha if alpha is not None else (1.0, 0.0))
    if name == "densecode":
        return dense_coding_net(alpha if alpha is not None else (0.5, 0.5, 0.5, 0.5))
    if name in ("sysenv", "sysenv1"):
        return sys_env_net(1, seed=seed)
    if name == "sysenv2":
        return sys_env_net(2, seed=seed)
    if name == "twomix":
        return two_mixtures_net(seed=seed)
    raise errors.FileFormatError(f"unknown fixture {name!r}")


def _demo_holevo() -> None:
    trine, double = trine_ensemble(), double_trine_ensemble()
    _out(f"trine chi\t{fmt(holevo(trine))}")
    _out(f"trine POM mutual information\t{fmt(mutual_info(channel(trine, trine_pom())))}")
    _out(f"double trine chi\t{fmt(holevo(double))}")
    _out(f"double trine, trine POM on each qubit\t{fmt(mutual_info(channel(double, trine_product_pom())))}")


def cmd_demo(args) -> int:
    if args.name == "holevo":
        _demo_holevo()
        return EXIT_OK
    name = "sysenv2" if args.name == "sysenv" and args.steps == 2 else args.name
    fx = _fixture(name, args)
    keys = list(fx.tables)
    for key in keys:
        if len(keys) > 1:
            _out(f"# {key}")
        for line in fx.table_lines(key):
            _out(line)
    if args.verbose:
        rep = fx.run()
        for c in rep.checks:
            _out(str(c))
    return EXIT_OK


_EXPORTS_NET = ("epr", "eraser", "teleport", "densecode", "sysenv1", "sysenv2", "twomix")
_EXPORTS_OTHER = ("trine-ensemble", "double-trine-ensemble", "trine-pom")


def cmd_export(args) -> int:
    if args.name == "trine-ensemble":
        text = format_ensemble(trine_ensemble())
    elif args.name == "double-trine-ensemble":
        text = format_ensemble(double_trine_ensemble())
    elif args.name == "trine-pom":
        text = format_pom(trine_pom())
    else:
        fx = _fixture(args.name, args)
        nets = fx.all_nets()
        if args.subnet and args.subnet not in nets:
            raise errors.FileFormatError(f"unknown sub-net {args.subnet!r}; choose from {sorted(nets)}")
        net = nets[args.subnet] if args.subnet else fx.net
        text = format_net(net)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qbnet", description="Quantum and classical Bayesian net calculator.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", help="check every normalization condition of a net file")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("entropy", help="entropy of an expression after a reduction")
    s.add_argument("file")
    s.add_argument("--recipe", default="", help="e.g. 'esum(e);trace(b);project(f=2)'")
    s.add_argument("--expr", required=True)
    s.add_argument("--kind", choices=("S", "H"), default="S")
    s.set_defaults(func=cmd_entropy)

    s = sub.add_parser("probs", help="probability table of some nodes")
    s.add_argument("file")
    s.add_argument("--gamma", required=True, help="comma-separated node names")
    s.add_argument("--given", help="conditioning values, e.g. 'a=0,b=1'")
    s.set_defaults(func=cmd_probs)

    s = sub.add_parser("reduce", help="reduced density matrix")
    s.add_argument("file")
    s.add_argument("--recipe", default="")
    s.add_argument("--out", choices=("matrix", "diag"), default="matrix")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("holevo", help="Holevo quantity of an ensemble file")
    s.add_argument("file")
    s.set_defaults(func=cmd_holevo)

    s = sub.add_parser("accinfo", help="search for the accessible information of an ensemble file")
    s.add_argument("file")
    s.add_argument("--outcomes", type=int, default=None, help="POM size (default d^2)")
    s.add_argument("--restarts", type=int, default=8)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_accinfo)

    s = sub.add_parser("check", help="run a seeded property suite")
    s.add_argument("suite", choices=sorted(SUITES))
    s.add_argument("--trials", type=int, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("demo", help="print the entropy tables of a worked net")
    s.add_argument("name", choices=("epr", "eraser", "teleport", "densecode", "sysenv", "twomix", "holevo"))
    s.add_argument("--alpha", help="input amplitudes, comma-separated complex literals")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--steps", type=int, choices=(1, 2), default=1)
    s.add_argument("--verbose", action="store_true", help="also print every expected identity")
    s.set_defaults(func=cmd_demo)

    s = sub.add_parser("export", help="write a worked net, ensemble or POM to a file")
    s.add_argument("name", choices=_EXPORTS_NET + _EXPORTS_OTHER)
    s.add_argument("--out", help="destination file (default stdout)")
    s.add_argument("--alpha")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--subnet", help="export a named sub-net instead of the main net")
    s.set_defaults(func=cmd_export)
    return p


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, _PARSE_ERRORS):
        return EXIT_PARSE
    if isinstance(exc, _INVALID_ERRORS):
        return EXIT_INVALID
    return EXIT_NUMERIC


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_PARSE
    try:
        return args.func(args)
    except (errors.QbnetError, ArithmeticError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
