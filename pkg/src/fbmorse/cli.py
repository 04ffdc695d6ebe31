"""Command-line front end: ``fbmorse {spectrum,index-scan,verify,fem,report}``.

Every document written embeds the tool version and the full run
configuration.  ``--no-timestamp`` makes JSON output byte-identical across
runs with the same configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Optional

from . import __version__
from .errors import ConvergenceFailure, FbMorseError, GapTooSmall
from .models import ModelHypersurface
from .reports import as_plain
from .spectra import (
    empirical_window,
    index_scan,
    jacobi_spectrum,
    jacobi_spectrum_degrees,
    radius_window,
    strong_index,
    weak_index,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    """Bad user input; reported on stderr with exit code 2."""


@dataclass
class RunConfig:
    command: str
    model: Optional[dict] = None
    lmax: Optional[int] = None
    refine: Optional[int] = None
    r_grid: Optional[tuple[float, float, float]] = None
    n: Optional[int] = None
    k: Optional[int] = None
    halved_factor: str = "Second"
    suite: str = "all"
    family: Optional[str] = None
    samples: Optional[int] = None
    seed: int = 42
    output_path: Optional[str] = None
    format: str = "json"
    timestamp: bool = True
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("timestamp")
        if d["r_grid"] is not None:
            d["r_grid"] = list(d["r_grid"])
        return d


# ---------------------------------------------------------------------------
# parsing helpers


def parse_model(text: str) -> ModelHypersurface:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--model is not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise UsageError("--model must be a JSON object")
    try:
        return ModelHypersurface.from_dict(obj)
    except (FbMorseError, ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"invalid model: {exc}") from None


def parse_grid(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"--grid must look like lo:hi:step, got {text!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"--grid values must be numbers, got {text!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi) and math.isfinite(step)):
        raise UsageError("--grid values must be finite")
    if step <= 0:
        raise UsageError("--grid step must be positive")
    if not lo < hi:
        raise UsageError("--grid needs lo < hi")
    return lo, hi, step


def grid_points(lo: float, hi: float, step: float) -> list[float]:
    """``lo, lo+step, ...`` up to ``hi`` inclusive, rounded to suppress float drift."""
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(count)]


def _clean(obj):
    # JSON has no nan/inf; write them as strings
    obj = as_plain(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_clean(v) for v in obj]
    return obj


def envelope(cfg: RunConfig, result) -> dict:
    doc = {"tool": "fbmorse", "version": __version__, "config": cfg.to_dict()}
    if cfg.timestamp:
        doc["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    doc["result"] = _clean(result)
    return doc


def _csv_text(cfg: RunConfig, header, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# fbmorse {__version__}\n")
    buf.write("# config " + json.dumps(cfg.to_dict(), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def emit(cfg: RunConfig, result, summary: str, csv_table=None):
    """Write the document to ``--out`` (summary on stdout) or to stdout (summary on stderr)."""
    if cfg.format == "csv":
        if csv_table is None:
            raise UsageError(f"{cfg.command} has no CSV form; use --format json")
        text = _csv_text(cfg, *csv_table)
    else:
        text = json.dumps(envelope(cfg, result), indent=2) + "\n"
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)


# ---------------------------------------------------------------------------
# commands


def cmd_spectrum(cfg: RunConfig) -> int:
    m = parse_model(json.dumps(cfg.model))
    if cfg.lmax is not None:
        if cfg.lmax < 1:
            raise UsageError("--lmax must be >= 1")
        spec = jacobi_spectrum_degrees(m, cfg.lmax)
    else:
        spec = jacobi_spectrum(m, count=weak_index(m).strong_index + 8)
    s = strong_index(m)
    w = weak_index(m)
    result = {
        "model": m.to_dict(),
        "label": m.label(),
        "spectrum": spec.to_dict(),
        "lambda1": s.lambda1,
        "lambda1_weak": s.lambda1_weak,
        "strong": s.to_dict(),
        "weak": w.to_dict(),
    }
    summary = (f"{m.label()}: lambda1 = {s.lambda1:.12g}, MI = {s.strong_index}, "
               f"weak MI = {s.weak_index}")
    if s.discrepancy_flag or w.discrepancy_flag:
        summary += " (differs from the claimed count, see notes)"
    rows = [(ln.value, ln.multiplicity, ";".join(map(str, ln.labels)), spec.exact_below) for ln in spec.lines]
    emit(cfg, result, summary, (["value", "multiplicity", "labels", "exact_below"], rows))
    return EXIT_OK


def cmd_index_scan(cfg: RunConfig) -> int:
    n, k = cfg.n, cfg.k
    if n is None or k is None:
        raise UsageError("index-scan needs --n and --k")
    if cfg.r_grid is None:
        raise UsageError("index-scan needs --grid lo:hi:step")
    lo, hi, step = cfg.r_grid
    if not (0.0 < lo and hi < 1.0):
        raise UsageError("radii must lie strictly between 0 and 1")
    radii = grid_points(lo, hi, step)
    try:
        a_lo, a_hi = radius_window(n, k)
        rows = index_scan(n, k, radii, cfg.halved_factor)
    except FbMorseError as exc:
        raise UsageError(str(exc)) from None
    try:
        emp = empirical_window(rows, n + 1)
        contiguous = True
    except ValueError:
        emp, contiguous = None, False
    window = {"analytic": [a_lo, a_hi], "empirical": list(emp) if emp else None,
              "target_weak_index": n + 1, "contiguous": contiguous, "step": step}
    if emp:
        dev = max(abs(emp[0] - a_lo), abs(emp[1] - a_hi))
        window["max_endpoint_deviation"] = dev
        summary = (f"weak index = {n + 1} on [{emp[0]:.6g}, {emp[1]:.6g}]; analytic window "
                   f"[{a_lo:.6g}, {a_hi:.6g}]; max endpoint deviation {dev:.3g} (step {step:g})")
    else:
        window["max_endpoint_deviation"] = None
        summary = f"weak index = {n + 1} not attained on a single run of the grid; analytic window [{a_lo:.6g}, {a_hi:.6g}]"
    result = {"rows": [asdict(r) for r in rows], "window": window}
    table = (["r", "strong", "weak", "lambda1", "lambda1_weak"],
             [(r.r, r.strong, r.weak, r.lambda1, r.lambda1_weak) for r in rows])
    emit(cfg, result, summary, table)
    return EXIT_OK


def _bound_label(rep) -> str:
    fp = rep.family_params or {}
    keys = [f"{k}={fp[k]}" for k in ("kind", "n", "k", "r") if fp.get(k) is not None]
    return f"{rep.name}({', '.join(keys)})" if keys else rep.name


def cmd_verify(cfg: RunConfig) -> int:
    from .verify import run_suites

    opts = {}
    if cfg.family is not None:
        opts["family"] = cfg.family
    if cfg.n is not None:
        opts["n"] = cfg.n
    if cfg.k is not None:
        opts["k"] = cfg.k
    try:
        reports = run_suites([cfg.suite], seed=cfg.seed, samples=cfg.samples, **opts)
    except FbMorseError as exc:
        raise UsageError(str(exc)) from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    failed = [r.name for r in reports if not r.passed]
    equal = [_bound_label(r) for r in reports if getattr(r, "equality", False) and getattr(r, "applies", False)]
    summary = f"{len(reports) - len(failed)}/{len(reports)} reports pass"
    if equal:
        summary += f"; equality at {len(equal)}: " + ", ".join(equal[:6]) + (" ..." if len(equal) > 6 else "")
    if failed:
        summary += "; FAILED: " + ", ".join(failed)
    table = (["name", "pass", "max_residual_or_slack", "tolerance"],
             [(r.name, r.passed, float(getattr(r, "max_residual", getattr(r, "slack", math.nan))),
               float(getattr(r, "tolerance", math.nan))) for r in reports])
    emit(cfg, [r.to_dict() for r in reports], summary, table)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_fem(cfg: RunConfig) -> int:
    from .fem import compare_with_engine, fem_index
    from .fem.oracle import MAX_REFINE, mesh_for

    m = parse_model(json.dumps(cfg.model))
    if m.n != 2:
        raise UsageError(f"fem supports n = 2 only, got n = {m.n}")
    refine = 5 if cfg.refine is None else cfg.refine
    if not 1 <= refine <= MAX_REFINE:
        raise UsageError(f"--refine must lie in 1..{MAX_REFINE}, got {refine}")
    try:
        res = fem_index(m, refine, seed=cfg.seed)
    except (ConvergenceFailure, GapTooSmall) as exc:
        diag = getattr(exc, "diagnostics", None) or {"eigenvalue": getattr(exc, "eigenvalue", None),
                                                     "eps_gap": getattr(exc, "eps_gap", None)}
        print(f"error: {type(exc).__name__}: {exc} {json.dumps(_clean(diag))}", file=sys.stderr)
        return EXIT_FAIL
    comp = compare_with_engine(m, res)
    dump = cfg.extras.get("dump_matrices")
    if dump:
        from .fem import assemble, dump_matrix_market
        K, M = assemble(mesh_for(m, refine), res.extras["potential"])
        dump_matrix_market(f"{dump}_K.mtx", K, "Jacobi stiffness K0 - c M")
        dump_matrix_market(f"{dump}_M.mtx", M, "P1 mass")
    if cfg.extras.get("mesh_out"):
        mesh_for(m, refine).to_off(cfg.extras["mesh_out"])
    result = {"model": m.to_dict(), "eigen": res.to_dict(), "comparison": comp}
    summary = (f"{m.label()} refine {refine} ({res.dof} dof, {res.method}): FEM strong/weak "
               f"{comp['fem_strong']}/{comp['fem_weak']}, engine {comp['engine_strong']}/{comp['engine_weak']}, "
               f"agreement {comp['strong_agree'] and comp['weak_agree']}")
    if comp["paper_discrepancy_strong"]:
        summary += f"; paper claims {comp['paper_claim_strong']} (annotation)"
    table = (["index", "fem", "exact", "abs_error", "rel_error"],
             [(r["index"], r["fem"], r["exact"], r["abs_error"],
               "" if r["rel_error"] is None else r["rel_error"]) for r in comp["eigenvalues"]])
    emit(cfg, result, summary, table)
    return EXIT_OK if comp["strong_agree"] and comp["weak_agree"] else EXIT_FAIL


def _report_models(nmax: int) -> list[ModelHypersurface]:
    out = []
    for n in range(2, nmax + 1):
        out.append(ModelHypersurface.equator(n))
        out.append(ModelHypersurface.cap(n, 0.5))
        for k in range(1, n):
            out.append(ModelHypersurface.clifford(n, k))
            lo, hi = radius_window(n, k)
            for r in (round(lo / 2, 6), round((lo + hi) / 2, 6), round((1 + hi) / 2, 6)):
                out.append(ModelHypersurface.htorus(n, k, r))
    return out


def cmd_report(cfg: RunConfig) -> int:
    """Index table against the claimed counts, plus the radius windows."""
    nmax = cfg.n or 6
    if nmax < 2:
        raise UsageError("--n must be >= 2")
    rows = []
    for m in _report_models(nmax):
        s, w = strong_index(m), weak_index(m)
        rows.append({
            "model": m.to_dict(), "label": m.label(),
            "lambda1": s.lambda1, "lambda1_weak": s.lambda1_weak,
            "strong": s.strong_index, "weak": s.weak_index,
            "paper_strong": s.paper_claim, "paper_strong_relation": s.paper_claim_relation,
            "paper_weak": w.paper_claim, "paper_weak_relation": w.paper_claim_relation,
            "discrepancy": s.discrepancy_flag or w.discrepancy_flag,
        })
    windows = [{"n": n, "k": k, "window": list(radius_window(n, k))}
               for n in range(2, nmax + 1) for k in range(1, n)]
    flagged = [r["label"] for r in rows if r["discrepancy"]]
    summary = f"{len(rows)} models tabulated; {len(flagged)} differ from the claimed index"
    table = (["label", "lambda1", "lambda1_weak", "strong", "weak", "paper_strong", "paper_weak", "discrepancy"],
             [(r["label"], r["lambda1"], r["lambda1_weak"], r["strong"], r["weak"],
               "" if r["paper_strong"] is None else r["paper_strong"],
               "" if r["paper_weak"] is None else r["paper_weak"], r["discrepancy"]) for r in rows])
    emit(cfg, {"models": rows, "radius_windows": windows, "discrepancies": flagged}, summary, table)
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "index-scan": cmd_index_scan,
    "verify": cmd_verify,
    "fem": cmd_fem,
    "report": cmd_report,
}


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="RNG seed (default 42)")
    common.add_argument("--out", help="write the document here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--no-timestamp", action="store_true", help="omit the timestamp (reproducible output)")

    p = argparse.ArgumentParser(prog="fbmorse", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"fbmorse {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", parents=[common], help="closed-form Jacobi spectrum of one model")
    sp.add_argument("--model", required=True, help='JSON descriptor, e.g. \'{"kind":"Equator","n":3}\'')
    sp.add_argument("--lmax", type=int, help="harmonic degree cutoff per factor")

    sp = sub.add_parser("index-scan", parents=[common], help="index of half H-tori across radii")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--grid", required=True, help="lo:hi:step")
    sp.add_argument("--halved", choices=("First", "Second"), default="Second")

    sp = sub.add_parser("verify", parents=[common], help="run verification suites")
    sp.add_argument("--suite", default="all", choices=("all", "identities", "bounds", "alencar", "kato"))
    sp.add_argument("--samples", type=int)
    sp.add_argument("--family", choices=("minimal", "cap", "htorus"))
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)

    sp = sub.add_parser("fem", parents=[common], help="finite-element index of an n = 2 model")
    sp.add_argument("--model", required=True)
    sp.add_argument("--refine", type=int, default=5)
    sp.add_argument("--dump-matrices", metavar="PREFIX", help="write PREFIX_K.mtx and PREFIX_M.mtx")
    sp.add_argument("--mesh-out", metavar="PATH", help="write the mesh in OFF format")

    sp = sub.add_parser("report", parents=[common], help="index table versus the claimed counts")
    sp.add_argument("--n", type=int, help="largest dimension tabulated (default 6)")
    return p


def config_from_args(args) -> RunConfig:
    cfg = RunConfig(command=args.command, seed=args.seed, output_path=args.out,
                    format=args.format, timestamp=not args.no_timestamp)
    if getattr(args, "model", None) is not None:
        cfg.model = parse_model(args.model).to_dict()
    for name in ("lmax", "refine", "n", "k", "samples", "family"):
        if getattr(args, name, None) is not None:
            setattr(cfg, name, getattr(args, name))
    if getattr(args, "suite", None):
        cfg.suite = args.suite
    if getattr(args, "halved", None):
        cfg.halved_factor = args.halved
    if getattr(args, "grid", None) is not None:
        cfg.r_grid = parse_grid(args.grid)
    if cfg.samples is not None and cfg.samples < 1:
        raise UsageError("--samples must be >= 1")
    for name in ("dump_matrices", "mesh_out"):
        if getattr(args, name, None):
            cfg.extras[name] = getattr(args, name)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
