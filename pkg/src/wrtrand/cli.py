"""Command-line front end.

Exit codes: 0 success, 1 validation error, 2 failed statistical gate.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io as wio
from .errors import WRTError
from .predictor import (
    DEFAULT_GENERA,
    DEFAULT_LEVELS,
    bundle_sharpness_certificate,
    sharp_bound_probability,
    table1,
)
from .rmt import WalkConfig, haar_entry_samples, run_entry_walk, run_trace_walk
from .stats import AnalyticLaw, EmpiricalDistribution, ks_test
from .tqft import (
    Level,
    canonical_spine,
    count_admissible,
    det_exponent,
    dim_mu_ratio,
    twist_spectrum,
    verlinde_dimension,
)

EXIT_OK, EXIT_INVALID, EXIT_GATE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_INVALID)


def _int_list(text: str) -> list[int]:
    if not text.strip():
        return []
    return [int(t) for t in text.split(",")]


def _common(p):
    p.add_argument("--format", choices=("csv", "json", "pretty"), default="pretty")
    p.add_argument("--out", type=Path, help="write data here and a <out>.manifest.json sidecar")
    p.add_argument("--manifest", type=Path,
                   help="manifest path for runs that print to stdout (default: none)")
    p.add_argument("--seed", type=int, default=0, help="64-bit seed (default 0)")
    p.add_argument("--threads", type=int, default=1)


def _level_genus(p, genus_required=True):
    p.add_argument("--level", type=int, help="odd level r >= 5")
    p.add_argument("--genus", type=int, required=False, help="genus g >= 1")


def _sampling(p, walk: bool):
    _level_genus(p)
    p.add_argument("--dim", type=int, help="matrix size d >= 2 (default: Verlinde d for --level/--genus)")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--group", choices=("U", "SU"), default="U" if not walk else "SU")
    if walk:
        p.add_argument("--length", type=int, help="walk length (default 50*d)")
        p.add_argument("--generators", type=int, default=3)
        p.add_argument("--no-inverses", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wrtrand", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dim", help="Verlinde dimension d_g, cross-checked by labeling count")
    _common(p), _level_genus(p)
    p = sub.add_parser("spectrum", help="Dehn twist eigenvalue exponents (g = 1, 2)")
    _common(p), _level_genus(p)
    p = sub.add_parser("det-exp", help="determinant exponent e with det = A^e")
    _common(p), _level_genus(p)
    p = sub.add_parser("ratio", help="d_g / mu^(2-2g)")
    _common(p), _level_genus(p)
    p = sub.add_parser("haar", help="Haar (1,1)-entry samples")
    _common(p), _sampling(p, walk=False)
    p = sub.add_parser("walk", help="(1,1)-entries of random-walk products")
    _common(p), _sampling(p, walk=True)
    p = sub.add_parser("trace-walk", help="traces of random-walk products")
    _common(p), _sampling(p, walk=True)
    p = sub.add_parser("fit", help="one-sample KS test of a sample file")
    _common(p), _level_genus(p)
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--law", choices=("entry", "rayleigh", "z"), required=True,
                   help="entry: |X_d|; rayleigh: tail exp(-x^2); z: mu^(1-g)|X_d| after rescaling")
    p.add_argument("--dim", type=int)
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--rescale", action="store_true",
                   help="multiply |values| by mu^(1-g) before testing (needs --level/--genus)")
    p = sub.add_parser("table1", help="sharp genus-bound probabilities")
    _common(p)
    p.add_argument("--levels", type=_int_list, default=list(DEFAULT_LEVELS))
    p.add_argument("--genera", type=_int_list, default=list(DEFAULT_GENERA))
    p.add_argument("--allow-nonprime", action="store_true")
    p = sub.add_parser("bundle-cert", help="surface-bundle non-sharpness audit")
    _common(p)
    p.add_argument("--level", type=int)
    p.add_argument("--genus", type=int)
    return parser


# --------------------------------------------------------------------------
# argument checks


def _level(args) -> Level:
    if args.level is None:
        raise UsageError("--level is required (odd integer >= 5)")
    try:
        return Level(args.level)
    except WRTError as exc:
        raise UsageError(f"--level {args.level}: {exc}") from None


def _genus(args, lo=1, hi=None) -> int:
    if args.genus is None:
        raise UsageError(f"--genus is required (integer >= {lo})")
    if args.genus < lo or (hi is not None and args.genus > hi):
        rng = f">= {lo}" if hi is None else f"in [{lo}, {hi}]"
        raise UsageError(f"--genus {args.genus}: must be {rng}")
    return args.genus


def _check_common(args):
    if not 0 <= args.seed < 2**64:
        raise UsageError(f"--seed {args.seed}: must be in [0, 2^64)")
    if args.threads < 1:
        raise UsageError(f"--threads {args.threads}: must be >= 1")
    if getattr(args, "samples", 1) < 1:
        raise UsageError(f"--samples {args.samples}: must be >= 1")
    if getattr(args, "length", None) is not None and args.length < 1:
        raise UsageError(f"--length {args.length}: must be >= 1")
    if getattr(args, "generators", 2) < 2:
        raise UsageError(f"--generators {args.generators}: must be >= 2")


def _dim(args) -> int:
    if args.dim is not None:
        if args.dim < 2:
            raise UsageError(f"--dim {args.dim}: must be >= 2")
        return args.dim
    if args.level is None or args.genus is None:
        raise UsageError("give --dim, or --level and --genus to use the Verlinde dimension")
    return verlinde_dimension(_level(args), _genus(args))


# --------------------------------------------------------------------------
# commands; each returns (payload, pretty_text, csv_text, exit_code)


def _table_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    keys = list(rows[0])
    lines = [",".join(keys)]
    lines += [",".join(str(r[k]) for k in keys) for r in rows]
    return "\n".join(lines) + "\n"


def cmd_dim(args):
    level, g = _level(args), _genus(args)
    d = verlinde_dimension(level, g)
    n = count_admissible(level, canonical_spine(g))
    if n != d:
        raise AssertionError(f"labeling count {n} != Verlinde {d}")
    row = {"r": level.r, "genus": g, "d": d, "labelings": n}
    return row, str(d), _table_csv([row]), EXIT_OK


def cmd_spectrum(args):
    level, g = _level(args), _genus(args, 1, 2)
    rows = twist_spectrum(level, g)
    text = "\n".join(
        f"a={x['label']:>3}  A^{x['a_exponent']}  (zeta^{x['zeta_exponent']} mod {4 * level.r})  x{x['multiplicity']}"
        for x in rows
    )
    return {"r": level.r, "genus": g, "spectrum": rows}, text, _table_csv(rows), EXIT_OK


def cmd_det_exp(args):
    level, g = _level(args), _genus(args)
    rep = det_exponent(level, g).to_dict()
    if rep["e"] is None:
        text = f"det = 1 (genus {g} >= 3, trivial abelianization; e not computed)"
    else:
        text = (f"e = {rep['e']}  4r | e: {rep['divisible_by_4r']}  det = 1: {rep['det_is_one']}  "
                f"in <A^4>: {rep['in_A4_subgroup']}")
    return rep, text, _table_csv([rep]), EXIT_OK


def cmd_ratio(args):
    level, g = _level(args), _genus(args)
    val = dim_mu_ratio(level, g)
    row = {"r": level.r, "genus": g, "ratio": val}
    return row, repr(val), _table_csv([row]), EXIT_OK


def _samples_out(sset):
    vals = sset.values
    summary = (f"{len(vals)} samples, d={sset.dim}; mean |v|^2 = {np.mean(np.abs(vals) ** 2):.6f}, "
               f"mean |v| = {np.mean(np.abs(vals)):.6f}")
    return sset, summary


def cmd_haar(args):
    d = _dim(args)
    sset = haar_entry_samples(d, args.samples, args.seed, group=args.group)
    return _samples_out(sset)


def _walk_config(args) -> WalkConfig:
    return WalkConfig(
        dim=_dim(args), group=args.group, num_generators=args.generators,
        include_inverses=not args.no_inverses, walk_length=args.length,
        num_samples=args.samples, seed=args.seed,
    )


def cmd_walk(args):
    return _samples_out(run_entry_walk(_walk_config(args), threads=args.threads))


def cmd_trace_walk(args):
    return _samples_out(run_trace_walk(_walk_config(args), threads=args.threads))


def cmd_fit(args):
    if not args.input.exists():
        raise UsageError(f"--input {args.input}: no such file")
    values, meta = wio.read_samples(args.input)
    x = np.abs(values)
    if args.rescale or args.law == "z":
        level, g = _level(args), _genus(args)
        x = x * level.mu ** (1 - g)
    if args.law == "rayleigh":
        law = AnalyticLaw.rayleigh()
    elif args.law == "z":
        level, g = _level(args), _genus(args)
        law = AnalyticLaw.entry(verlinde_dimension(level, g), scale=level.mu ** (1 - g))
    else:
        d = args.dim if args.dim is not None else meta.get("dim")
        if d is None:
            raise UsageError("--law entry needs --dim (input file has no dim metadata)")
        law = AnalyticLaw.entry(int(d))
    if not 0 < args.alpha < 1:
        raise UsageError(f"--alpha {args.alpha}: must be in (0, 1)")
    rep = ks_test(EmpiricalDistribution(x), law, args.alpha)
    payload = {"ks": rep.to_dict(), "input_meta": meta}
    verdict = "PASS" if rep.passed else "FAIL"
    text = (f"{verdict}: D_n = {rep.statistic:.6f} vs critical {rep.critical_value:.6f} "
            f"(n={rep.n}, alpha={rep.alpha}, law={law.describe()})")
    row = {k: v for k, v in rep.to_dict().items() if k != "law"}
    return payload, text, _table_csv([row]), EXIT_OK if rep.passed else EXIT_GATE


def cmd_table1(args):
    for r in args.levels:
        try:
            lv = Level(r)
        except WRTError as exc:
            raise UsageError(f"--levels {r}: {exc}") from None
        if not lv.is_prime and not args.allow_nonprime:
            raise UsageError(f"--levels {r}: not prime (pass --allow-nonprime to override)")
    for g in args.genera:
        if g < 2:
            raise UsageError(f"--genera {g}: must be >= 2")
    t = table1(args.levels, args.genera, allow_nonprime=args.allow_nonprime)
    text = t.to_pretty() if args.genera else ""
    if args.allow_nonprime and any(not Level(r).is_prime for r in args.levels):
        text += "\n(non-prime levels are outside the density hypothesis)"
    return t.to_json(), text, t.to_csv(), EXIT_OK


def cmd_bundle_cert(args):
    if args.level is None and args.genus is None:
        grid = [(r, g) for r in DEFAULT_LEVELS for g in DEFAULT_GENERA]
    else:
        grid = [(_level(args).r, _genus(args, 2))]
    certs = [bundle_sharpness_certificate(Level(r), g) for r, g in grid]
    rows = [c.to_dict() for c in certs]
    text = "\n".join(c.message() + ("  => certified" if c.certified else "  => NOT certified") for c in certs)
    return {"certificates": rows}, text, _table_csv(rows), EXIT_OK


COMMANDS = {
    "dim": cmd_dim,
    "spectrum": cmd_spectrum,
    "det-exp": cmd_det_exp,
    "ratio": cmd_ratio,
    "haar": cmd_haar,
    "walk": cmd_walk,
    "trace-walk": cmd_trace_walk,
    "fit": cmd_fit,
    "table1": cmd_table1,
    "bundle-cert": cmd_bundle_cert,
}
SAMPLE_COMMANDS = {"haar", "walk", "trace-walk"}


def _render(args, result) -> tuple[str, int]:
    if args.command in SAMPLE_COMMANDS:
        sset, summary = result
        if args.format == "csv":
            return wio.samples_to_csv(sset.values, sset.meta), EXIT_OK
        if args.format == "json":
            return wio.samples_to_json(sset.values, sset.meta), EXIT_OK
        return summary + "\n", EXIT_OK
    payload, text, csv_text, code = result
    if args.format == "json":
        meta = {"command": args.command}
        return wio.dumps({"meta": meta, "data": payload}), code
    if args.format == "csv":
        return csv_text, code
    return text + "\n", code


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    started = wio.now()
    try:
        _check_common(args)
        if args.command in SAMPLE_COMMANDS and args.out is not None and args.format == "pretty":
            args.format = "csv"
        result = COMMANDS[args.command](args)
        text, code = _render(args, result)
    except UsageError as exc:
        sys.stderr.write(f"wrtrand {args.command}: {exc}\n")
        return EXIT_INVALID
    except WRTError as exc:
        sys.stderr.write(f"wrtrand {args.command}: {type(exc).__name__}: {exc}\n")
        return EXIT_INVALID
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
        wio.write_manifest(args.out, argv, args.seed, started, {"exit_code": code}, side=args.manifest)
    else:
        sys.stdout.write(text)
        if args.manifest is not None:
            wio.write_manifest(None, argv, args.seed, started, {"exit_code": code},
                               side=args.manifest, stdout_text=text)
    return code


if __name__ == "__main__":
    sys.exit(main())
