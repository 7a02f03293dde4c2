"""
Command-line front end.

    halfpoincare eval     --level 4 --m 13/2 --source psi:1 --z 0.1+1i
    halfpoincare coeffs   --level 4 --m 13/2 --n-terms 16 --out coeffs.csv
    halfpoincare lvalue   --level 4 --m 13/2 --s 4.5
    halfpoincare certify  --level 4 --m 13/2 --s 3.0
    halfpoincare m0       --eps 1 --nu 2 --eta 1
    halfpoincare sanity

Values are resolved in the order flag, config file (``--config``), built-in
default.  Exit status: 0 on success, 1 when a certificate is not
certified-nonvanishing or a sanity residual fails, 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import io as hio
from .certificates import (Gauge, RectangleSpec, certify_reflected, certify_strip, find_m0_rectangle,
                           region_integrals)
from .groups import GroupSpec, IncompatibleCharacter, build_group
from .metaplectic import HalfIntegerWeight
from .series import (DomainError, ExpSource, KernelSource, TruncationBudget, lvalue_dirichlet, lvalue_unfolded,
                     poincare_coefficients, poincare_eval)
from .special import identity_suite

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2

DEFAULTS = {
    "level": 4,
    "weight_numerator": 13,
    "character": "trivial",
    "c_bound": None,            # 400 * level
    "n_terms": 200,
    "tol": 1e-8,
    "threads": 1,
    "gauge": "abs",
    "out": None,
    "format": "report",
}


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def parse_complex(text: str) -> complex:
    """'3', '3+1i', '0.5-2i', 'i' or Python's '3+1j'."""
    t = text.strip().replace(" ", "").replace("i", "j")
    if t in ("j", "+j"):
        return 1j
    if t == "-j":
        return -1j
    try:
        return complex(t)
    except ValueError:
        raise ConfigError(f"cannot parse complex number {text!r}") from None


def _weight_numerator(text: str) -> int:
    try:
        return HalfIntegerWeight.parse(text).numerator
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("group")
    g.add_argument("--config", help="INI file with [group], [numeric], [output] sections")
    g.add_argument("--level", type=int)
    g.add_argument("--m", dest="weight_numerator", type=_weight_numerator, metavar="M", help="half-integral weight, e.g. 13/2")
    g.add_argument("--character", help="trivial, kronecker:D or table:v0,v1,...")
    n = common.add_argument_group("numeric")
    n.add_argument("--c-bound", dest="c_bound", type=float)
    n.add_argument("--n-terms", dest="n_terms", type=int)
    n.add_argument("--tol", type=float)
    n.add_argument("--threads", type=int, help="worker threads, 0 = auto")
    n.add_argument("--gauge", help="abs, pow:alpha or clamp:c")
    o = common.add_argument_group("output")
    o.add_argument("--out", help="write the artifact here instead of standard output")
    o.add_argument("--format", choices=("report", "csv"))

    p = _Parser(prog="halfpoincare", description="Half-integral weight Poincare series and non-vanishing certificates.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("eval", parents=[common], help="evaluate a Poincare series")
    e.add_argument("--source", default="psi:1", help="psi:n (exponential seed) or kernel (uses --s)")
    e.add_argument("--s", type=parse_complex)
    e.add_argument("--z", type=parse_complex, action="append", required=True)

    c = sub.add_parser("coeffs", parents=[common], help="Fourier coefficients a_1..a_K, K = --n-terms")
    c.add_argument("--source", default="psi:1")
    c.add_argument("--s", type=parse_complex)
    c.add_argument("--y0", type=float, help="sampling height (default chosen from K)")

    lv = sub.add_parser("lvalue", parents=[common], help="L-value by Dirichlet series and by unfolding")
    lv.add_argument("--s", type=parse_complex, required=True)
    lv.add_argument("--source", default="psi:1")
    lv.add_argument("--kernel-s", dest="kernel_s", type=parse_complex, help="seed parameter for --source kernel")
    lv.add_argument("--coeffs", dest="coeffs_csv", help="read coefficients from a CSV table instead")
    lv.add_argument("--y0", type=float)

    ce = sub.add_parser("certify", parents=[common], help="non-vanishing certificate")
    ce.add_argument("--s", type=parse_complex, required=True)
    ce.add_argument("--kind", choices=("strip", "reflected"), default="strip",
                    help="strip: 1 < Re s < m/2; reflected: m/2 < Re s < m - 1")
    ce.add_argument("--regions", action="store_true", help="also integrate the kernel gauge mass (strip only)")

    m0 = sub.add_parser("m0", parents=[common], help="least weight for the rectangle criterion")
    m0.add_argument("--eps", type=float, required=True)
    m0.add_argument("--nu", type=float, required=True)
    m0.add_argument("--eta", type=float, required=True, help="half-height of the rectangle")

    sub.add_parser("sanity", parents=[common], help="special-function identity residuals")
    return p


def resolve(args: argparse.Namespace) -> dict:
    """Merge flags over the config file over the defaults."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            cfg.update(hio.load_config(args.config))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if cfg["c_bound"] is None:
        cfg["c_bound"] = 400.0 * cfg["level"]
    if cfg["level"] < 1 or cfg["level"] % 4:
        raise ConfigError("level must be a positive multiple of 4")
    if not (cfg["tol"] > 0 and cfg["n_terms"] > 0 and cfg["c_bound"] > 0 and cfg["threads"] >= 0):
        raise ConfigError("tolerances and budgets must be positive")
    if cfg["format"] not in ("report", "csv"):
        raise ConfigError("format must be report or csv")
    if cfg["threads"] == 0:
        cfg["threads"] = os.cpu_count() or 1
    cfg["m"] = str(HalfIntegerWeight(cfg["weight_numerator"]))
    return cfg


def _group(cfg):
    try:
        return build_group(GroupSpec(cfg["level"], cfg["m"], cfg["character"]))
    except (ValueError, IncompatibleCharacter) as exc:
        raise ConfigError(str(exc)) from None


def _budget(cfg) -> TruncationBudget:
    return TruncationBudget(cfg["c_bound"], cfg["n_terms"], cfg["tol"])


def _source(text: str, s):
    kind, _, arg = text.partition(":")
    if kind == "psi":
        try:
            return ExpSource(int(arg or 1))
        except ValueError:
            raise ConfigError(f"bad source {text!r}") from None
    if kind == "kernel":
        if s is None:
            raise ConfigError("the kernel source needs --s")
        return KernelSource(complex(s))
    raise ConfigError(f"unknown source {text!r}; use psi:n or kernel")


def _emit(text: str, cfg) -> None:
    if cfg["out"]:
        with open(cfg["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_eval(args, cfg) -> int:
    group = _group(cfg)
    pv = poincare_eval(group, _source(args.source, args.s), args.z, _budget(cfg), cfg["threads"])
    if cfg["format"] == "csv":
        lines = ["z_re,z_im,re,im,tail"]
        lines += ["%.17g,%.17g,%.17g,%.17g,%.17g" % (z.real, z.imag, v.real, v.imag, t)
                  for z, v, t in zip(args.z, pv.value, pv.tail_estimate)]
        _emit("\n".join(lines) + "\n", cfg)
    else:
        data = {"command": "eval", "group": _group_dict(cfg, group), "source": args.source,
                "s": args.s, "budget": _budget_dict(cfg),
                "values": [{"z": z, "value": v, "tail_estimate": t}
                           for z, v, t in zip(args.z, pv.value, pv.tail_estimate)],
                "vanished_by_central_character": pv.vanished_by_central_character,
                "rows": pv.rows, "terms": pv.terms, "note": pv.note}
        _emit(hio.to_report_text(data), cfg)
    return EXIT_OK


def _cmd_coeffs(args, cfg) -> int:
    group = _group(cfg)
    fs = poincare_coefficients(group, _source(args.source, args.s), cfg["n_terms"], _budget(cfg),
                               args.y0, cfg["threads"])
    if cfg["format"] == "csv":
        _emit(hio.coefficients_to_csv(fs), cfg)
    else:
        data = {"command": "coeffs", "group": _group_dict(cfg, group), "source": args.source, "s": args.s,
                "coefficients": [{"n": int(n), "a_n": a, "error": e}
                                 for n, a, e in zip(fs.n, fs.coeffs, fs.coeff_errors)]}
        _emit(hio.to_report_text(data), cfg)
    return EXIT_OK


def _cmd_lvalue(args, cfg) -> int:
    group = _group(cfg)
    if args.coeffs_csv:
        fs = hio.read_coefficients_csv(args.coeffs_csv, group.spec.m, group.h)
    else:
        fs = poincare_coefficients(group, _source(args.source, args.kernel_s), cfg["n_terms"], _budget(cfg),
                                   args.y0, cfg["threads"])
    out = {"command": "lvalue", "group": _group_dict(cfg, group), "s": args.s, "K": fs.K}
    any_ok = False
    for name, fn in (("dirichlet", lambda: lvalue_dirichlet(fs, args.s)),
                     ("unfolded", lambda: lvalue_unfolded(fs, args.s, group))):
        try:
            lv = fn()
            out[name] = {"value": lv.value, "error_estimate": lv.error_estimate}
            any_ok = True
        except DomainError as exc:
            out[name] = {"unavailable": str(exc)}
    _emit(hio.to_report_text(out), cfg)
    if not any_ok:
        print("no L-value representation covers this s", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def _cmd_certify(args, cfg) -> int:
    group = _group(cfg)
    fn = certify_strip if args.kind == "strip" else certify_reflected
    try:
        Gauge.parse(cfg["gauge"])
        rep = fn(cfg["m"], group.h, group.N, args.s, error_budget=min(cfg["tol"], 1e-9))
    except (DomainError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    data = {"command": "certify", "group": _group_dict(cfg, group), "report": rep.to_dict()}
    data["report"]["inputs"]["gauge"] = cfg["gauge"]
    if group.vanishes_identically:
        data["note"] = "the character is incompatible with the centre: every Poincare series vanishes"
    if args.regions and args.kind == "strip":
        ri = region_integrals(cfg["m"], group.h, group.N, args.s, Gauge.parse(cfg["gauge"]))
        data["region_integrals"] = vars(ri)
    _emit(hio.to_report_text(data), cfg)
    if not rep.certified:
        print(f"verdict: {rep.verdict}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def _cmd_m0(args, cfg) -> int:
    try:
        rect = RectangleSpec(args.eps, args.nu, args.eta)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    res = find_m0_rectangle(rect)
    if cfg["format"] == "csv":
        lines = ["m,R,passed"] + ["%.17g,%.17g,%d" % (m, r, p) for m, r, p in res.trace]
        _emit("\n".join(lines) + "\n", cfg)
    else:
        data = {"command": "m0", "eps": rect.eps, "nu": rect.nu, "eta_height": rect.eta_height,
                "m0": str(res.m0), "m0_float": float(res.m0), "threshold": res.threshold,
                "R_at_m0": float(res.R[res.iterations - 1]), "candidates_scanned": res.iterations}
        _emit(hio.to_report_text(data), cfg)
    return EXIT_OK


def _cmd_sanity(args, cfg) -> int:
    results = identity_suite()
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name:<42s} residual {r.residual:.3e}  (<= {r.threshold:.0e})"
             for r in results]
    _emit("\n".join(lines) + "\n", cfg)
    bad = [r for r in results if not r.passed]
    if bad:
        print(f"{len(bad)} identity checks failed", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def _group_dict(cfg, group) -> dict:
    return {"level": cfg["level"], "m": cfg["m"], "character": cfg["character"], "h": group.h, "N": group.N,
            "epsilon_gamma": group.epsilon_gamma, "central_compatible": group.central_compatible,
            "cusp_compatible": group.cusp_compatible}


def _budget_dict(cfg) -> dict:
    return {"c_bound": cfg["c_bound"], "n_terms": cfg["n_terms"], "tol": cfg["tol"]}


COMMANDS = {"eval": _cmd_eval, "coeffs": _cmd_coeffs, "lvalue": _cmd_lvalue, "certify": _cmd_certify,
            "m0": _cmd_m0, "sanity": _cmd_sanity}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = resolve(args)
        return COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:       # --help
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
