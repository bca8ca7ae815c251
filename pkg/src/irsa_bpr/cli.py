"""Command line front end: ``irsa-bpr {threshold,bounds,simulate,sweep,selftest}``.

Exit status is 0 on success, 1 on usage or configuration errors and 2 on
numerical failures (no bisection bracket, decoder inconsistency).
"""
from __future__ import annotations

import argparse
import itertools
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import asymptotics as asy
from .bpr import BlockObservation, DecodingError, bpr_decode, build_code
from .encoding import EncodingError, IrsaDistribution
from .harness import (
    EXAMPLE_ROUNDS,
    ConfigError,
    SimConfig,
    m_from_eps,
    read_config,
    run_sweep,
    sweep_csv,
    simulate,
    worked_example,
)
from .sic import sic_decode

log = logging.getLogger("irsa_bpr")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2

BOUNDS_HEADER = "T,scheme,eta,nu,gamma,eps,G_converse,Rsum_bound"
THRESHOLD_HEADER = "dist,T,eta,G_star"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    """``"4"``, ``"1,2,8"`` or an inclusive range ``"1-16"``."""
    out = []
    for part in text.split(","):
        if "-" in part.strip()[1:]:
            a, b = part.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        elif part.strip():
            out.append(int(part))
    return out


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="irsa-bpr", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    th = sub.add_parser("threshold", help="density-evolution load threshold")
    th.add_argument("--dist", required=True)
    th.add_argument("--T", type=_ints, required=True)
    th.add_argument("--tol-G", type=float, default=1e-4)
    th.add_argument("--out")

    bd = sub.add_parser("bounds", help="converse load and sum-rate bounds")
    bd.add_argument("--scheme", choices=[*asy.SCHEMES, "all"], default="all")
    bd.add_argument("--T", type=_ints, required=True)
    bd.add_argument("--eps", type=float, required=True)
    bd.add_argument("--eta", type=_floats, help="IRSA efficiency (or give --dist)")
    bd.add_argument("--dist")
    bd.add_argument("--nu", type=float, default=0.0)
    bd.add_argument("--gamma", type=float, default=0.0)
    bd.add_argument("--out")

    for name, helptext in (("simulate", "Monte Carlo at one load"), ("sweep", "Monte Carlo over loads")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--config", help="flat key=value file; flags override it")
        sp.add_argument("--K", type=int)
        sp.add_argument("--Ns", type=int)
        sp.add_argument("--pi")
        sp.add_argument("--G")
        sp.add_argument("--dist")
        sp.add_argument("--T", type=int)
        sp.add_argument("--m", type=int)
        sp.add_argument("--eps", type=float)
        sp.add_argument("--trials", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--engine", choices=["auto", "symbol", "graph"])
        sp.add_argument("--workers", type=int)
        sp.add_argument("--out")

    sub.add_parser("selftest", help="quick end-to-end consistency checks")
    return p


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    sys.stdout.write(text)


def _merged(args) -> dict:
    opts = read_config(Path(args.config).read_text()) if getattr(args, "config", None) else {}
    for key in ("K", "Ns", "pi", "G", "dist", "T", "m", "eps", "trials", "seed", "engine", "workers", "out"):
        val = getattr(args, key)
        if val is not None:
            opts[key] = val
    return opts


def _sim_config(opts: dict) -> tuple[SimConfig, list[float], list[float]]:
    for key in ("K", "Ns", "dist", "T"):
        if key not in opts:
            raise UsageError(f"missing --{key}")
    K, n_slots, T = int(opts["K"]), int(opts["Ns"]), int(opts["T"])
    if ("m" in opts) == ("eps" in opts):
        raise UsageError("give exactly one of --m and --eps")
    if "m" in opts:
        m = int(opts["m"])
    else:
        m, eps_real = m_from_eps(K, float(opts["eps"]))
        log.info("m = %d, realized eps = %.10g", m, eps_real)
    if ("pi" in opts) == ("G" in opts):
        raise UsageError("give exactly one of --pi and --G")
    loads = _floats(str(opts["G"])) if "G" in opts else []
    pis = _floats(str(opts["pi"])) if "pi" in opts else []
    base = SimConfig(
        K=K,
        n_slots=n_slots,
        pi=pis[0] if pis else loads[0] * n_slots / K,
        dist=IrsaDistribution.parse(str(opts["dist"])),
        T=T,
        m=m,
        trials=int(opts.get("trials", 100)),
        seed=int(opts.get("seed", 0)),
        engine=str(opts.get("engine", "auto")),
    )
    for cfg_pi in pis or [G * n_slots / K for G in loads]:
        log.info("G = %.10g <-> pi = %.10g", cfg_pi * K / n_slots, cfg_pi)
    return base, loads, pis


def cmd_threshold(args) -> int:
    dist = IrsaDistribution.parse(args.dist)
    rows = [THRESHOLD_HEADER]
    for T in args.T:
        g = asy.load_threshold(dist, T, tol_G=args.tol_G)
        log.info("G*(%s, T=%d) = %.6f", dist, T, g)
        rows.append(f'"{dist}",{T},{dist.efficiency:.10g},{g:.10g}')
    _emit("\n".join(rows) + "\n", args.out)
    return EXIT_OK


def cmd_bounds(args) -> int:
    if args.eta:
        etas = args.eta
    elif args.dist:
        etas = [IrsaDistribution.parse(args.dist).efficiency]
    else:
        etas = [0.5]
    if not 0 < args.eps < 1:
        raise UsageError("--eps must be in (0, 1)")
    schemes = asy.SCHEMES if args.scheme == "all" else (args.scheme,)
    rows = [BOUNDS_HEADER]
    for T, scheme, eta in itertools.product(args.T, schemes, etas):
        nu, gamma = (args.nu, args.gamma) if scheme == "mixed" else (0.0, 0.0)
        g = asy.converse_G(scheme, T, eta, nu, gamma)
        rate = asy.converse_sum_rate(g, args.eps, T)
        rows.append(",".join([str(T), scheme] + [f"{x:.10g}" for x in (eta, nu, gamma, args.eps, g, rate)]))
    _emit("\n".join(rows) + "\n", args.out)
    return EXIT_OK


def cmd_simulate(args, sweep: bool) -> int:
    opts = _merged(args)
    base, loads, pis = _sim_config(opts)
    workers = int(opts.get("workers", 1))
    if not sweep:
        if len(loads) + len(pis) != 1:
            raise UsageError("simulate takes a single load; use sweep for several")
        base.validate()
        text = sweep_csv([simulate(base, workers)])
    else:
        reports, text = run_sweep(base, loads=loads, pis=pis, workers=workers)
        if any(r.error for r in reports):
            log.warning("%d sweep point(s) failed", sum(bool(r.error) for r in reports))
    _emit(text, opts.get("out"))
    return EXIT_OK


def cmd_selftest(args) -> int:
    checks = []

    def check(name, fn):
        t0 = time.perf_counter()
        try:
            ok = bool(fn())
        except Exception as exc:  # reported, not raised
            log.debug("selftest %s raised", name, exc_info=True)
            ok, name = False, f"{name} ({exc})"
        checks.append(ok)
        print(f"{'PASS' if ok else 'FAIL'} {name} [{time.perf_counter() - t0:.2f}s]")

    def codebook():
        code = build_code(4, 2, 5)
        sums = {}
        for size in range(3):
            for sub in itertools.combinations(range(code.M), size):
                s = code.columns[list(sub)].sum(axis=0, dtype=np.int64)
                key = s.tobytes()
                if key in sums:
                    return False
                sums[key] = sub
                got = bpr_decode(code, BlockObservation(s, size))
                want = sorted((code.user_of_column(j), code.message_of_column(j)) for j in sub)
                if got != want:
                    return False
        return len(sums) == 121

    def example():
        ex = worked_example()
        res = sic_decode(ex.signal, ex.scheme)
        rounds = [sorted(u for u, _ in r) for r in res.per_iteration]
        return res.flag == 0 and rounds == [list(r) for r in EXAMPLE_ROUNDS]

    check("zero-error codebook m=4 T=2 K=5", codebook)
    check("worked SIC example (2 rounds)", example)
    check("threshold x^2, T=1 ~ 0.5", lambda: abs(asy.load_threshold(IrsaDistribution({2: 1.0}), 1) - 0.5) < 1e-3)
    check("threshold x^3, T=1 ~ 0.818", lambda: abs(asy.load_threshold(IrsaDistribution({3: 1.0}), 1) - 0.818) < 5e-3)
    check("converse irsa eta=1/2, T=1 ~ 0.797", lambda: abs(asy.converse_G("irsa", 1, 0.5) - 0.797) < 1e-3)
    return EXIT_OK if all(checks) else EXIT_NUMERIC


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"irsa-bpr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        if args.command == "threshold":
            return cmd_threshold(args)
        if args.command == "bounds":
            return cmd_bounds(args)
        if args.command in ("simulate", "sweep"):
            return cmd_simulate(args, sweep=args.command == "sweep")
        return cmd_selftest(args)
    except (UsageError, ConfigError, EncodingError, OSError) as exc:
        print(f"irsa-bpr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, DecodingError) as exc:
        print(f"irsa-bpr: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"irsa-bpr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
