"""Command-line entry point: ``ncmorita {verify,decide,chain,weyl}``.

Exit codes: 0 on success (all checks pass), 1 when a check fails,
2 on invalid input (parse, config or pole errors).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import heisenberg_weyl as hw
from .errors import ConfigError, NcMoritaError
from .exact import FINITE_ORDER, GeneratorWord, parse_intmat2, parse_theta, word_decompose
from .morita import decide_finite, decide_z, finite_chain, z_chain
from .verify import RunConfig, run_suite, summarize

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_CONFIG_FLAGS = {"theta": "theta", "c": "c", "N": "N", "m": "m", "L": "L",
                 "tol": "tolerance", "window": "window", "seed": "seed"}


def _emit(lines, out_path):
    text = "".join(line + "\n" for line in lines)
    sys.stdout.write(text)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _config_from_args(args) -> RunConfig:
    base = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                base = RunConfig.from_json_text(fh.read()).__dict__.copy()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc.strerror}", field="config") from None
    for flag, name in _CONFIG_FLAGS.items():
        v = getattr(args, flag, None)
        if v is not None:
            base[name] = v
    if isinstance(base.get("theta"), str):
        try:
            base["theta"] = Fraction(base["theta"])
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"theta must be p/q, got {base['theta']!r}", field="theta") from None
    return RunConfig(**base)


def cmd_verify(args) -> int:
    cfg = _config_from_args(args)
    tiers = ("exact", "quadrature") if args.tier == "all" else (args.tier,)
    reports = run_suite(cfg, tiers)
    lines = [json.dumps(r.to_json(), sort_keys=True) for r in reports]
    summary = summarize(reports)
    lines.append(json.dumps({"summary": summary, "config": cfg.as_params()}, sort_keys=True))
    _emit(lines, args.out)
    return EXIT_OK if summary["ok"] else EXIT_FAIL


def _parse_group(text: str):
    t = text.strip()
    if t.startswith("Z:"):
        return "Z", parse_intmat2(t[2:])
    if t in ("Z2", "Z3", "Z4", "Z6"):
        return "finite", int(t[1:])
    raise ValueError(f"cannot parse group {text!r}: expected Z2|Z3|Z4|Z6 or Z:[a,b;c,d]")


def cmd_decide(args) -> int:
    t1, t2 = parse_theta(args.theta1), parse_theta(args.theta2)
    kind, g1 = _parse_group(args.group)
    if kind == "finite":
        if args.group2 is not None:
            raise ValueError("a finite group takes a single group argument")
        d = decide_finite(t1, t2, g1)
    else:
        if args.group2 is None:
            g2 = g1
        else:
            kind2, g2 = _parse_group(args.group2)
            if kind2 != "Z":
                raise ValueError("both groups must be of the form Z:[a,b;c,d]")
        d = decide_z(t1, t2, g1, g2)
    _emit([json.dumps(d.to_json(), sort_keys=True)], args.out)
    return EXIT_OK


def cmd_chain(args) -> int:
    r = parse_theta(args.theta)
    if not isinstance(r, Fraction):
        raise ValueError("chain needs a rational theta")
    cert = finite_chain(r) if args.A is None else z_chain(r, parse_intmat2(args.A))
    _emit([cert.dumps()], args.out)
    return EXIT_OK


def parse_word(text: str) -> GeneratorWord:
    t = text.strip()
    if t in ("W2", "W3", "W4", "W6"):
        return word_decompose(FINITE_ORDER[int(t[1:])])
    if t.startswith("["):
        return word_decompose(parse_intmat2(t))
    w = GeneratorWord.parse(t)
    bad = [tok for tok in w.tokens if tok not in ("J0", "J0inv", "P", "Pinv")]
    if bad:
        raise ValueError(f"unknown generator {bad[0]!r}")
    return w


def cmd_weyl(args) -> int:
    w = parse_word(args.word)
    theta = Fraction(args.theta) if args.theta is not None else Fraction(2, 5)
    spec = hw.GridSpec(theta, args.c if args.c is not None else 2,
                       args.m if args.m is not None else 8, args.N if args.N is not None else 2048)
    if args.gaussian or args.input is None:
        f = hw.make_gaussian(spec, width=args.width)
    else:
        with open(args.input, encoding="utf-8") as fh:
            N, c, delta, L, samples = hw.parse_grid_dump(fh.read())
        if (N, c, delta) != (spec.N, spec.c, spec.delta):
            raise ValueError(f"dump grid (N={N}, c={c}, delta={delta}) does not match the requested grid")
        f = hw.GridFunction(spec, samples)
    text = hw.dump_grid_function(hw.weyl_word(w, f))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _grid_flags(p, with_config=False):
    p.add_argument("--theta", help="rational theta, p/q")
    p.add_argument("--c", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--m", type=int)
    if with_config:
        p.add_argument("--L", help="half-width of the grid; must equal N*delta/2")
        p.add_argument("--tol", type=float, help="quadrature tolerance scale (nominal 1e-6)")
        p.add_argument("--window", type=int, help="inner-product window radius R")
        p.add_argument("--seed", type=int)
        p.add_argument("--config", help="JSON file with RunConfig fields")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ncmorita", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the exact and quadrature check suites")
    _grid_flags(p, with_config=True)
    p.add_argument("--tier", choices=("all", "exact", "quadrature"), default="all")
    p.add_argument("--out", help="also write the JSON report here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("decide", help="decide Morita equivalence of two crossed products")
    p.add_argument("theta1")
    p.add_argument("theta2")
    p.add_argument("group", help="Z2|Z3|Z4|Z6 or Z:[a,b;c,d]")
    p.add_argument("group2", nargs="?", help="second Z:[a,b;c,d] for the Z case")
    p.add_argument("--out")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("chain", help="emit a replayable equivalence certificate for rational theta")
    p.add_argument("theta")
    p.add_argument("--A", help="attach an SL(2,Z) matrix for the Z case, e.g. [1,1;0,1]")
    p.add_argument("--out")
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("weyl", help="apply a Weyl operator and dump the result")
    p.add_argument("word", help="generator word ('J0 P Pinv'), W2..W6, or a matrix [a,b;c,d]")
    _grid_flags(p)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--gaussian", action="store_true", help="use the normalized centred Gaussian (default)")
    src.add_argument("--input", help="grid dump to transform")
    p.add_argument("--width", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_weyl)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        # downstream reader closed early (e.g. `| head`); not an error
        sys.stderr = open(os.devnull, "w")
        return EXIT_OK
    except (NcMoritaError, ValueError, ZeroDivisionError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
