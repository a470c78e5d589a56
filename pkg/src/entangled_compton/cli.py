"""Command-line interface: ``ecompton {scan2,scan1,ratio,point,selfcheck}``.

Every :class:`ScanConfig` field can be given in a ``key = value`` file
(``--config``) and overridden by a flag of the same name.  Exit codes: 0 on
success, 1 when a self-check fails, 2 on configuration errors, 3 when more
than half of the requested points are masked.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

import numpy as np

from . import __version__
from .errors import ConfigError, MaskedPointError
from .observables import stokes_tensor
from .scan import (
    ScanConfig,
    _FIELDS,
    _convert,
    _fmt,
    build_config,
    double_point,
    metadata,
    parse_config_text,
    ratio_rows,
    render_csv,
    run_ratio_table,
    run_scan,
    run_single_photon_scan,
    scan_rows,
    write_output,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_MASKED = 3
MASKED_LIMIT = 0.5


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags, which matches the config-error code
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key = value file with ScanConfig fields")
    group = parser.add_argument_group("scan configuration")
    for f in dataclasses.fields(ScanConfig):
        flags = [f"--{f.name}"]
        if "_" in f.name:
            flags.append(f"--{f.name.replace('_', '-')}")
        group.add_argument(*flags, dest=f.name, default=None, metavar="VALUE")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ecompton", description="Nonlinear single and double Compton scattering in a laser pulse.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("scan2", help="two-photon spectral grid")
    _add_config_flags(p)
    p = sub.add_parser("scan1", help="one-photon angular-spectral grid")
    _add_config_flags(p)
    p = sub.add_parser("ratio", help="off-/on-shell ratio of grid maxima")
    _add_config_flags(p)
    p = sub.add_parser("point", help="density matrix, concurrence and Stokes tensor at one point")
    p.add_argument("omega1", type=float, help="first photon energy in units of 4 gamma0^2 omega0")
    p.add_argument("omega2", type=float, help="second photon energy in the same units")
    _add_config_flags(p)
    sub.add_parser("selfcheck", help="run the internal consistency checks")
    return parser


def config_from_args(args: argparse.Namespace) -> ScanConfig:
    file_values = {}
    if args.config:
        try:
            with open(args.config) as fh:
                file_values = parse_config_text(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
    overrides = {name: _convert(name, getattr(args, name)) for name in _FIELDS if getattr(args, name, None) is not None}
    return build_config(file_values, overrides)


def _cmd_scan2(cfg: ScanConfig) -> int:
    scan = run_scan(cfg)
    header, rows = scan_rows(scan)
    write_output(render_csv(header, rows), metadata(cfg, "scan2", {"masked_fraction": scan.masked_fraction}), cfg.output)
    return EXIT_MASKED if scan.masked_fraction > MASKED_LIMIT else EXIT_OK


def _cmd_scan1(cfg: ScanConfig) -> int:
    header, rows, masked = run_single_photon_scan(cfg)
    write_output(render_csv(header, rows), metadata(cfg, "scan1", {"masked_fraction": masked}), cfg.output)
    return EXIT_MASKED if masked > MASKED_LIMIT else EXIT_OK


def _cmd_ratio(cfg: ScanConfig) -> int:
    entries = run_ratio_table(cfg)
    header, rows = ratio_rows(entries)
    write_output(render_csv(header, rows), metadata(cfg, "ratio"), cfg.output)
    masked = sum(not np.isfinite(e.log10) for e in entries) / max(1, len(entries))
    return EXIT_MASKED if masked > MASKED_LIMIT else EXIT_OK


def _print_matrix(out, name: str, m: np.ndarray) -> None:
    out.write(f"{name}:\n")
    for row in m:
        out.write("  " + "  ".join(f"{z.real:+.6e}{z.imag:+.6e}j" for z in row) + "\n")


def _cmd_point(cfg: ScanConfig, omega1: float, omega2: float, out=None) -> int:
    out = out or sys.stdout
    try:
        result = double_point(cfg, omega1 * cfg.scale, omega2 * cfg.scale)
    except MaskedPointError as exc:
        out.write(f"masked: {exc}\n")
        return EXIT_MASKED
    for ch, (obs, prob, rho) in result.items():
        out.write(f"[{ch}] omega1={_fmt(omega1)} omega2={_fmt(omega2)}\n")
        out.write(f"d2W = {_fmt(obs.d2w)}  omega0^2 d2W = {_fmt(obs.d2w_normalized)}  dual-path = {_fmt(prob)}\n")
        _print_matrix(out, "rho (emission basis)", rho.matrix)
        if not obs.defined:
            out.write("state undefined: probability below the normalization floor\n")
            continue
        out.write(f"concurrence = {_fmt(obs.concurrence)}\n")
        out.write("Stokes tensor s[l1, l2] (HV basis):\n")
        for row in obs.stokes:
            out.write("  " + "  ".join(f"{x:+.6f}" for x in row) + "\n")
    return EXIT_OK


def _cmd_selfcheck(out=None) -> int:
    from .selfcheck import run_selfcheck

    out = out or sys.stdout
    results = run_selfcheck()
    for r in results:
        out.write(r.line() + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.verb == "selfcheck":
        return _cmd_selfcheck()
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    if args.verb == "scan2":
        return _cmd_scan2(cfg)
    if args.verb == "scan1":
        return _cmd_scan1(cfg)
    if args.verb == "ratio":
        return _cmd_ratio(cfg)
    return _cmd_point(cfg, args.omega1, args.omega2)


if __name__ == "__main__":
    sys.exit(main())
