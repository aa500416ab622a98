"""Command-line entry point: `qlan decompose|converge|verify <lemma>`."""

from __future__ import annotations

import argparse
import sys

from . import experiments as ex
from .errors import DimensionError, ResourceLimitError, TruncationError

EXIT_OK = 0
EXIT_CONTRACT = 1
EXIT_RESOURCE = 2


def _parse_floats(s: str) -> tuple[float, ...]:
    return tuple(float(x) for x in s.split(",") if x != "")

def _parse_ints(s: str) -> tuple[int, ...]:
    return tuple(int(x) for x in s.split(",") if x != "")

def _parse_complexes(s: str) -> tuple[complex, ...]:
    # accepts "0.5+0.3i,0.1-0.2i" (i or j suffix)
    return tuple(complex(x.replace("i", "j")) for x in s.split(",") if x != "")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--mu", type=_parse_floats, default=(0.7, 0.3),
                   metavar="a,b,...", help="spectrum, strictly decreasing, sums to 1")
    p.add_argument("--u", type=_parse_floats, default=(0.5,),
                   metavar="a,...", help="classical local parameter (d-1 entries)")
    p.add_argument("--zeta", type=_parse_complexes, default=(0.5 + 0.3j,),
                   metavar="re+imi,...", help="off-diagonal local parameter per mode")
    p.add_argument("--n-list", type=_parse_ints, default=(8, 16, 32, 64),
                   metavar="n1,n2,...")
    p.add_argument("--fock-cutoff", type=int, default=30)
    p.add_argument("--basis-cutoff", type=int, default=None)
    p.add_argument("--alpha", type=float, default=0.6)
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--gamma", type=float, default=0.24)
    p.add_argument("--eta", type=float, default=0.2)
    p.add_argument("--disp-const", choices=sorted(ex.gs.DISPLACEMENT_CONSTANTS),
                   default="sqrt2")
    p.add_argument("--override-exponents", action="store_true",
                   help="allow exponents outside the convergence ranges")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=None,
                   help="csv for converge sweeps (default), json otherwise")


def _config(args: argparse.Namespace, default_format: str) -> ex.ExperimentConfig:
    return ex.ExperimentConfig(
        d=args.d,
        mu=args.mu,
        u=args.u,
        zeta=args.zeta,
        n_list=args.n_list,
        alpha=args.alpha,
        beta=args.beta,
        gamma=args.gamma,
        eta=args.eta,
        fock_cutoff=args.fock_cutoff,
        basis_cutoff=args.basis_cutoff,
        disp_const=args.disp_const,
        out=args.out,
        format=args.format or default_format,
        override_exponents=args.override_exponents,
    )


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as f:
            f.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="qlan",
        description="Block decomposition, Gaussian-limit convergence sweeps, "
        "and lemma verifiers for collective quantum state models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("decompose", "converge"):
        _add_common(sub.add_parser(name))
    pv = sub.add_parser("verify")
    pv.add_argument("lemma", choices=sorted(set(ex.VERIFY_LEMMAS)))
    _add_common(pv)
    args = parser.parse_args(argv)

    try:
        if args.command == "converge":
            config = _config(args, "csv")
            result = ex.run_converge(config)
        elif args.command == "decompose":
            config = _config(args, "json")
            result = ex.run_decompose(config)
        else:
            config = _config(args, "json")
            result = ex.run_verify(args.lemma, config)
    except (ValueError, DimensionError, ResourceLimitError, TruncationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RESOURCE

    text = ex.to_csv(result) if config.format == "csv" else ex.to_json(result)
    _emit(text, config.out)

    if result.get("kind") == "verify" and not result["passed"]:
        return EXIT_CONTRACT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
