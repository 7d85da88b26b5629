"""Command-line front end: ``kmcf <command> [options]``.

Exit codes: 0 success, 1 verification failure or route disagreement,
2 usage error, 3 internal consistency error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import charring, correction, hfun
from .cache import MultiplicityCache
from .errors import (
    ClosedFormUnavailable,
    ConstancyViolation,
    KMCFError,
    LeftNegativeCone,
    MalformedGCM,
    NonTriangularResidue,
    NotDominant,
    NotInSupport,
    NotQMinusDominant,
    NotSymmetrizable,
    NotUniversalCoxeter,
    ParseError,
    SupportViolation,
)
from .rootsys import PRESETS, RootSystem, height, validate_gcm
from .series import IntLaurent, IntSeries
from .weyl import circle_act, elements_up_to, poincare

log = logging.getLogger("kmcf")

FORMATS = ("text", "json", "csv", "latex")
USAGE_ERRORS = (
    ParseError,
    MalformedGCM,
    NotSymmetrizable,
    NotInSupport,
    NotUniversalCoxeter,
    NotDominant,
    NotQMinusDominant,
    LeftNegativeCone,
    ClosedFormUnavailable,
)
VECTOR_FLAGS = ("--mu", "--lambda")


@dataclass
class JobConfig:
    gcm: str | None
    preset: str | None
    h_max: int
    qdeg: int
    mode: str
    exact: bool
    fmt: str
    cache_dir: str | None
    jobs: int

    def source_label(self) -> str:
        return self.gcm or f"preset:{self.preset or 'h3'}"


def parse_vector(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.strip().strip("()[]").replace(" ", "").split(","))
    except ValueError:
        raise ParseError(f"cannot parse {text!r} as comma-separated integers") from None


def load_root_system(cfg: JobConfig) -> RootSystem:
    cache = MultiplicityCache.from_env(cfg.cache_dir)
    if cfg.gcm is None:
        return RootSystem.preset(cfg.preset or "h3", cache=cache)
    try:
        data = json.loads(Path(cfg.gcm).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read {cfg.gcm}: {exc}") from None
    except ValueError as exc:
        raise ParseError(f"{cfg.gcm} is not valid JSON: {exc}") from None
    if isinstance(data, list):
        data = {"matrix": data}
    if "matrix" not in data:
        raise ParseError(f"{cfg.gcm} has no 'matrix' entry")
    cartan = validate_gcm(data["matrix"])
    table = None
    if data.get("multiplicities"):
        table = {}
        for entry in data["multiplicities"]:
            root = tuple(int(x) for x in entry["root"])
            if len(root) != cartan.rank:
                raise ParseError(f"multiplicity root {list(root)} has the wrong rank")
            table[root] = int(entry["m"])
    return RootSystem(cartan, table, cache)


# -- rendering --------------------------------------------------------------


def _cell_latex(v) -> str:
    s = str(v)
    return f"${s}$" if s.startswith("-") or "^" in s else s


def render_table(header: list[str], rows: list[list], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=2, sort_keys=False)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue().rstrip("\n")
    if fmt == "latex":
        cols = "|" + "|".join("c" for _ in header) + "|"
        lines = [f"\\begin{{tabular}}{{{cols}}}", "\\hline", " & ".join(header) + " \\\\", "\\hline"]
        for r in rows:
            lines.append(" & ".join(_cell_latex(v) for v in r) + " \\\\")
        lines += ["\\hline", "\\end{tabular}"]
        return "\n".join(lines)
    cells = [[str(h) for h in header]] + [[str(v) for v in r] for r in rows]
    widths = [max(len(c[k]) for c in cells) for k in range(len(header))]
    return "\n".join("  ".join(c[k].rjust(widths[k]) for k in range(len(header))).rstrip() for c in cells)


def _vec(v) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


def _coeffs(p: IntLaurent | IntSeries) -> list[int]:
    if isinstance(p, IntSeries):
        return list(p.coeffs)
    return p.to_list() if p.is_polynomial() else []


# -- commands ---------------------------------------------------------------


def cmd_roots(cfg: JobConfig) -> tuple[str, int]:
    rs = load_root_system(cfg)
    rows = []
    for beta, m in rs.positive_roots(cfg.h_max):
        depth = rs.depth(beta)
        kind = "real" if depth is not None else "imaginary"
        rows.append([_vec(beta), height(beta), kind, m, "" if depth is None else depth])
    header = ["root", "height", "type", "multiplicity", "depth"]
    return render_table(header, rows, cfg.fmt), 0


def cmd_h(cfg: JobConfig, mu: Sequence[int]) -> tuple[str, int]:
    rs = load_root_system(cfg)
    if len(mu) != rs.rank or any(x < 0 for x in mu):
        raise ParseError(f"mu={list(mu)} must be a nonnegative vector of length {rs.rank}")
    by_parts = hfun.H_partitions(rs, mu)
    by_product = hfun.H_product(rs, mu)
    agree = by_parts == by_product
    if cfg.fmt == "json":
        out = json.dumps(
            {"mu": list(mu), "H": by_parts.to_list(), "text": str(by_parts), "routes_agree": agree},
            sort_keys=True,
        )
    elif cfg.fmt == "text":
        out = str(by_parts) if agree else f"partitions: {by_parts}\nproduct: {by_product}\nDISAGREE"
    else:
        out = render_table(["mu", "H"], [[_vec(mu), str(by_parts)]], cfg.fmt)
    return out, 0 if agree else 1


def cmd_dlambda(cfg: JobConfig, lam: Sequence[int]) -> tuple[str, int]:
    rs = load_root_system(cfg)
    if len(lam) != rs.rank:
        raise ParseError(f"lambda={list(lam)} must have length {rs.rank}")
    strict = cfg.mode == "strict"
    series = correction.d_series(rs, lam, cfg.qdeg, strict=strict)
    exact = None
    note = None
    if cfg.exact:
        try:
            exact = correction.d_exact(rs, lam)
        except ConstancyViolation as exc:
            note = f"closed form skipped: {exc}"
    verdict = None if exact is None else ("AGREE" if series == exact else "DISAGREE")
    if cfg.fmt == "json":
        payload = {"lambda": list(lam), "series": _coeffs(series), "qdeg": cfg.qdeg}
        if exact is not None:
            payload.update(exact=_coeffs(exact), exact_text=str(exact), verdict=verdict)
        if note:
            payload["note"] = note
        out = json.dumps(payload, sort_keys=True)
    elif cfg.fmt == "text":
        lines = [str(exact)] if exact is not None else []
        lines.append(f"series: {series}")
        if verdict:
            lines.append(verdict)
        if note:
            lines.append(note)
        out = "\n".join(lines)
    else:
        rows = [["series", str(series)]]
        if exact is not None:
            rows.insert(0, ["exact", str(exact)])
            rows.append(["verdict", verdict])
        out = render_table(["route", "value"], rows, cfg.fmt)
    return out, 1 if verdict == "DISAGREE" else 0


def cmd_correction(cfg: JobConfig) -> tuple[str, int]:
    rs = load_root_system(cfg)
    h, D = cfg.h_max, cfg.qdeg
    M = charring.correction_M(rs, h, D, jobs=cfg.jobs)
    chi = poincare(rs.cartan, D)
    d = charring.char_expand(rs, M.scale(chi.inverse().to_laurent()))
    if cfg.fmt == "json":
        payload = {
            "M": M.to_json(),
            "d": [{"lambda": list(k), "coeff": _coeffs(v)} for k, v in d.items()],
        }
        return json.dumps(payload, sort_keys=True), 0
    rows = [["M", _vec(b), str(c)] for b, c in M.items()]
    rows += [["d", _vec(k), str(v)] for k, v in d.items()]
    return render_table(["kind", "exponent", "coefficient"], rows, cfg.fmt), 0


def cmd_verify(cfg: JobConfig, profile: str) -> tuple[str, int]:
    report = correction.verify_suite(profile)
    if cfg.fmt == "json":
        out = json.dumps(report.as_dict(), indent=2, sort_keys=True)
    else:
        rows = [
            [f.name, "PASS" if f.passed else "FAIL", f.checked, f.counterexample or ""]
            for f in report.families
        ]
        out = render_table(["family", "result", "checked", "counterexample"], rows, cfg.fmt)
    return out, 0 if report.passed else 1


def cmd_table(cfg: JobConfig, lam: Sequence[int], max_len: int) -> tuple[str, int]:
    """Rows w, columns q-degree: coefficients of H(-w o lam)."""
    rs = load_root_system(cfg)
    if len(lam) != rs.rank:
        raise ParseError(f"lambda={list(lam)} must have length {rs.rank}")
    A = rs.cartan
    data = []
    for w, _ in elements_up_to(A, max_len):
        data.append((w, tuple(-x for x in circle_act(A, w, lam)), hfun.H_wcircle(rs, lam, w)))
    top = max((p.degree for _, _, p in data), default=0)
    header = ["w", "w o lambda"] + [str(k) for k in range(1, max(top, 1) + 1)]
    rows = []
    for w, pt, p in data:
        rows.append([str(w), _vec(pt)] + [p[k] if p[k] else "" for k in range(1, max(top, 1) + 1)])
    if cfg.fmt == "json":
        out = json.dumps(
            [{"w": str(w), "point": list(pt), "H": p.to_list()} for w, pt, p in data], sort_keys=True
        )
        return out, 0
    return render_table(header, rows, cfg.fmt), 0


# -- argument handling --------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--gcm", metavar="PATH", help="JSON file with 'matrix' and optional 'multiplicities'")
    src.add_argument("--preset", choices=sorted(PRESETS), help="built-in matrix (default h3)")
    p.add_argument("--max-height", type=int, default=8, dest="h_max")
    p.add_argument("--qdeg", type=int, default=10)
    p.add_argument("--mode", choices=("strict", "explore"), default="strict")
    p.add_argument("--exact", action="store_true", help="also run the closed-form route")
    p.add_argument("--format", choices=FORMATS, default="text", dest="fmt")
    p.add_argument("--cache-dir", metavar="PATH", help="multiplicity cache (else $KMCF_CACHE_DIR)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="kmcf", description="Kac-Moody correction factor toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("roots", parents=[common], help="positive roots with multiplicities")
    h = sub.add_parser("h", parents=[common], help="H(mu; q) for mu in Q^+")
    h.add_argument("--mu", required=True)
    d = sub.add_parser("dlambda", parents=[common], help="d_lambda by series (and --exact closed form)")
    d.add_argument("--lambda", required=True, dest="lam")
    sub.add_parser("correction", parents=[common], help="M(q) coefficients and the d_lambda list")
    v = sub.add_parser("verify", parents=[common], help="run a verification profile")
    v.add_argument("--profile", required=True, choices=sorted(correction.PROFILES))
    t = sub.add_parser("table", parents=[common], help="coefficient table of H(-w o lambda)")
    t.add_argument("--lambda", required=True, dest="lam")
    t.add_argument("--max-len", type=int, default=3)
    return parser


def _normalize(argv: Sequence[str]) -> list[str]:
    """Glue ``--lambda -2,-2`` into ``--lambda=-2,-2`` so argparse accepts it."""
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in VECTOR_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def _config(ns: argparse.Namespace) -> JobConfig:
    if ns.h_max < 1 or ns.qdeg < 0 or ns.jobs < 1:
        raise ParseError("--max-height and --jobs must be positive, --qdeg nonnegative")
    return JobConfig(ns.gcm, ns.preset, ns.h_max, ns.qdeg, ns.mode, ns.exact, ns.fmt, ns.cache_dir, ns.jobs)


def run(argv: Sequence[str] | None = None) -> tuple[str, int]:
    parser = build_parser()
    ns = parser.parse_args(_normalize(sys.argv[1:] if argv is None else argv))
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING)
    cfg = _config(ns)
    if ns.command == "roots":
        return cmd_roots(cfg)
    if ns.command == "h":
        return cmd_h(cfg, parse_vector(ns.mu))
    if ns.command == "dlambda":
        return cmd_dlambda(cfg, parse_vector(ns.lam))
    if ns.command == "correction":
        return cmd_correction(cfg)
    if ns.command == "verify":
        return cmd_verify(cfg, ns.profile)
    return cmd_table(cfg, parse_vector(ns.lam), ns.max_len)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        out, code = run(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except USAGE_ERRORS as exc:
        print(f"kmcf: error: {exc}", file=sys.stderr)
        return 2
    except (NonTriangularResidue, SupportViolation) as exc:
        hint = getattr(exc, "suggested_cutoff", None)
        extra = f" (retry with --max-height {hint})" if hint else ""
        print(f"kmcf: cutoff or support problem: {exc}{extra}", file=sys.stderr)
        return 3
    except KMCFError as exc:
        print(f"kmcf: internal consistency error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    print(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
