"""Command line runner.

    gnatlab <command> --config <path> [--out <path>] [--format csv|json]

Exit status: 0 success, 1 a residual exceeded its tolerance, 2 the
configuration could not be parsed (nothing is written), 3 a domain or
numerical error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .base_geometry import DomainError, MetricError, eval_metric, gauss_curvature, rotation_i
from .bundle_curvature import bundle_curvature, totally_geodesic_residual
from .bundle_metric import BundlePoint, LiftedVector, lift_gram
from .config import ConfigError, ExperimentConfig, load_config
from .generators import GeneratorError, chebyshev_samples, classify
from .jacobi_osserman import (
    FrameError,
    NotRiemannianError,
    base_embedding_check,
    frame_lifted_u,
    entry_identities,
    osserman_test,
    zero_section_pattern_check,
    spectrum,
    closed_form_spectrum,
    zero_section_spectrum,
    zero_section_vertical_matrix_pattern,
)

COMMANDS = ("check-metric", "spectrum", "verify-identities", "osserman", "report")
COLUMNS = (
    ["experiment_id", "x1", "x2", "u1", "u2", "t", "direction"]
    + [f"lambda_{i}" for i in range(4)]
    + [f"normalized_{i}" for i in range(4)]
    + ["residuals", "flags"]
)

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_MATH = 0, 1, 2, 3


class ReportIOError(OSError):
    pass


def fmt(v) -> str:
    return "" if v is None else "%.17g" % float(v)


@dataclass
class ReportRow:
    experiment_id: str
    x: tuple = (None, None)
    u: tuple = (None, None)
    t: float | None = None
    direction: str = ""
    eigenvalues: tuple = (None,) * 4
    normalized: tuple = (None,) * 4
    residuals: dict = field(default_factory=dict)
    flags: tuple = ()
    order: tuple = ()

    def sort_key(self):
        pt = tuple(np.inf if v is None else v for v in self.x)
        return pt + (-1.0 if self.t is None else self.t,) + self.order

    def csv_fields(self) -> list[str]:
        res = ";".join(f"{k}={fmt(v)}" for k, v in self.residuals.items())
        return ([self.experiment_id, *map(fmt, self.x), *map(fmt, self.u), fmt(self.t), self.direction]
                + [fmt(v) for v in self.eigenvalues] + [fmt(v) for v in self.normalized]
                + [res, ";".join(self.flags)])

    def to_json(self) -> dict:
        num = lambda v: None if v is None else float(v)  # noqa: E731
        return {
            "experiment_id": self.experiment_id,
            "x": [num(v) for v in self.x],
            "u": [num(v) for v in self.u],
            "t": num(self.t),
            "direction": self.direction,
            "eigenvalues": [num(v) for v in self.eigenvalues],
            "normalized": [num(v) for v in self.normalized],
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "flags": list(self.flags),
        }


@dataclass
class RunResult:
    rows: list
    metadata: dict
    status: int = EXIT_OK


def sort_rows(rows):
    return sorted(rows, key=ReportRow.sort_key)


def emit_csv(rows, path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in sort_rows(rows):
        w.writerow(r.csv_fields())
    text = buf.getvalue()
    if path is not None:
        _write_atomic(path, text)
    return text


def emit_json(result: RunResult, path=None) -> str:
    doc = {"metadata": result.metadata, "rows": [r.to_json() for r in sort_rows(result.rows)]}
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path is not None:
        _write_atomic(path, text)
    return text


def _write_atomic(path, text: str) -> None:
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name, suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise ReportIOError(f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------------------- commands

def _spectrum_cols(rep):
    return tuple(rep.eigenvalues), tuple(rep.normalized)


def _flags(*groups):
    out = []
    for g in groups:
        out.extend(f for f in g if f not in out)
    return tuple(out)


def run_check_metric(cfg: ExperimentConfig) -> RunResult:
    t = chebyshev_samples(cfg.t_max, cfg.t_samples)
    cls = classify(cfg.generators, t)
    rows = []
    for i, row in enumerate(cls.rows()):
        flags = ("nondegenerate" if row["nondegenerate"] else "degenerate",
                 "riemannian" if row["riemannian"] else "not-riemannian")
        scalars = {k: row[k] for k in cls.scalars}
        rows.append(ReportRow(cfg.experiment_id, t=row["t"], direction="classification",
                              residuals=scalars, flags=flags, order=(i,)))
    meta = {"classification": {"nondegenerate": cls.nondegenerate, "riemannian": cls.riemannian,
                               "witnesses": cls.witnesses, "t_max": cfg.t_max, "samples": cfg.t_samples}}
    return RunResult(rows, meta)


def _points(cfg: ExperimentConfig):
    for ix, x in enumerate(cfg.points):
        cfg.chart.check(x)
        for idir, d in enumerate(cfg.directions):
            for t in cfg.t_values:
                yield ix, x, idir, d, float(t), BundlePoint.with_norm(cfg.chart, x, d, float(t))


def run_spectrum(cfg: ExperimentConfig) -> RunResult:
    tol = cfg.tolerances["spectrum"]
    rows, worst = [], 0.0
    for ix, x, idir, d, t, p in _points(cfg):
        if t > 0:
            pack = bundle_curvature(cfg.generators, cfg.chart, p)
            basis = frame_lifted_u(cfg.chart, p)
            X = LiftedVector.horizontal(p.u)
            jm = pack.jacobi(X, basis)
            G = lift_gram(cfg.generators, eval_metric(cfg.chart, p.x, 0).val, p.u)
            rep = spectrum(jm.matrix, False, float(X.components @ G @ X.components), basis.kind, jm.gram)
            label = f"u^h[{idir}]"
            flags = pack.flags
        else:
            rep = zero_section_spectrum(cfg.generators, cfg.chart, x, d)
            label = f"H^h[{idir}]"
            flags = ()
        worst = max(worst, rep.residuals["recomposition"])
        ev, nv = _spectrum_cols(rep)
        rows.append(ReportRow(cfg.experiment_id, tuple(x), tuple(p.u), t, label, ev, nv,
                              rep.residuals, _flags(rep.flags, flags), (idir,)))
    status = EXIT_VIOLATION if worst > tol else EXIT_OK
    return RunResult(rows, {"spectrum": {"max_recomposition_residual": worst}}, status)


def run_verify_identities(cfg: ExperimentConfig) -> RunResult:
    gen, chart = cfg.generators, cfg.chart
    tol_id, tol_sp = cfg.tolerances["identity"], cfg.tolerances["spectrum"]
    rows, worst = [], {}
    violated = False

    def record(name, value, tol):
        nonlocal violated
        worst[name] = max(worst.get(name, 0.0), value)
        if value > tol:
            violated = True

    for ix, x, idir, d, t, p in _points(cfg):
        res, flags = {}, []
        if t == 0:
            pack = bundle_curvature(gen, chart, p)
            rep = zero_section_spectrum(gen, chart, x, d, pack=pack)
            chk = zero_section_pattern_check(gen, chart, x, d, pack=pack)
            res["zero_section_off_pattern"] = chk["off_pattern"]
            res["zero_section_k_diagonal"] = chk["diagonal_k"]
            res["zero_section_k_eigen"] = rep.residuals["k_member"]
            try:
                res["vertical_zero_pattern"] = zero_section_vertical_matrix_pattern(gen, chart, x, d, pack=pack)
            except FrameError:
                flags.append("vertical-pattern-skipped")
            iD = rotation_i(chart, x, d)
            res["totally_geodesic"] = max(totally_geodesic_residual(gen, chart, x, X, Y, pack=pack)
                                          for X in (d, iD) for Y in (d, iD))
            g = eval_metric(chart, x, 0).val
            res["base_embedding"] = base_embedding_check(gen, chart, x, d / np.sqrt(d @ g @ d), pack=pack)[1]
            for k, v in res.items():
                record(k, v, tol_id)
        else:
            pack = bundle_curvature(gen, chart, p)
            basis = frame_lifted_u(chart, p)
            jm = pack.jacobi(LiftedVector.horizontal(p.u), basis)
            rep = spectrum(jm.matrix, False, 1.0, basis.kind, jm.gram)
            r1, r2 = entry_identities(gen, chart, p, pack=pack)
            res["entry_identity_1"], res["entry_identity_2"] = r1, r2
            record("entry_identity_1", r1, tol_id)
            record("entry_identity_2", r2, tol_id)
            try:
                pr = closed_form_spectrum(gen, chart, p, pack=pack)
                res["closed_form_deviation"] = pr.deviation
                record("closed_form_deviation", pr.deviation, tol_sp)
                flags.extend(pr.flags)
            except FrameError:
                flags.append("closed-form-skipped-not-riemannian")
            res["self_adjoint"] = jm.self_adjoint_residual()
            record("self_adjoint", res["self_adjoint"], tol_id)
            flags.extend(pack.flags)
        if any(v > (tol_sp if k == "closed_form_deviation" else tol_id) for k, v in res.items()):
            flags.append("violation")
        ev, nv = _spectrum_cols(rep)
        label = f"{'H' if t == 0 else 'u'}^h[{idir}]"
        rows.append(ReportRow(cfg.experiment_id, tuple(x), tuple(p.u), t, label, ev, nv,
                              res, _flags(rep.flags, flags), (idir,)))
    meta = {"identities": {"max_residuals": worst, "k": [gauss_curvature(chart, x) for x in cfg.points]}}
    return RunResult(rows, meta, EXIT_VIOLATION if violated else EXIT_OK)


def run_osserman(cfg: ExperimentConfig) -> RunResult:
    pts, keys = [], []
    for ix, x, idir, d, t, p in _points(cfg):
        pts.append(p)
        keys.append((tuple(x), idir, t))
    rep = osserman_test(cfg.generators, cfg.chart, pts, cfg.directions_per_point, cfg.tolerances["osserman"])
    rows = []
    for ip, (x, idir, t) in enumerate(keys):
        p = pts[ip]
        verdict = "pointwise-osserman" if rep.point_spreads[ip] < rep.pointwise.tolerance else "not-pointwise-osserman"
        for js, spec in enumerate(rep.spectra[ip]):
            rows.append(ReportRow(cfg.experiment_id, x, tuple(p.u), t, f"s{js}[{idir}]",
                                  tuple(spec), tuple(spec), {"point_spread": rep.point_spreads[ip]},
                                  (verdict,), (idir, js)))
    meta = {"osserman": {
        "pointwise": rep.pointwise.is_osserman,
        "global": rep.global_.is_osserman,
        "pointwise_spread": rep.pointwise.spectrum_spread,
        "global_spread": rep.global_.spectrum_spread,
        "directions_per_point": cfg.directions_per_point,
        "witnesses": {"pointwise": _plain(rep.pointwise.witnesses), "global": _plain(rep.global_.witnesses)},
    }}
    return RunResult(rows, meta)


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def run_report(cfg: ExperimentConfig) -> RunResult:
    rows, meta, status = [], {}, EXIT_OK
    parts = [("check-metric", run_check_metric), ("spectrum", run_spectrum),
             ("verify-identities", run_verify_identities)]
    cls = classify(cfg.generators, np.concatenate([chebyshev_samples(cfg.t_max, cfg.t_samples), cfg.t_values]))
    if cls.riemannian:
        parts.append(("osserman", run_osserman))
    else:
        meta["osserman"] = {"skipped": "generator set is not Riemannian", "witness": cls.witnesses}
    for name, fn in parts:
        res = fn(cfg)
        for r in res.rows:
            r.direction = f"{name}:{r.direction}" if r.direction else name
        rows.extend(res.rows)
        meta.update(res.metadata)
        meta.setdefault("status", {})[name] = res.status
        status = max(status, res.status)
    return RunResult(rows, meta, status)


RUNNERS = {
    "check-metric": run_check_metric,
    "spectrum": run_spectrum,
    "verify-identities": run_verify_identities,
    "osserman": run_osserman,
    "report": run_report,
}


def run(cfg: ExperimentConfig, command: str) -> RunResult:
    if command not in RUNNERS:
        raise ValueError(f"unknown command {command!r}")
    res = RUNNERS[command](cfg)
    res.metadata = {
        "experiment_id": cfg.experiment_id,
        "command": command,
        "version": __version__,
        "surface": cfg.chart.name,
        "generators": cfg.generators.to_json(),
        "tolerances": dict(sorted(cfg.tolerances.items())),
        "exit_status": res.status,
        **_plain(res.metadata),
    }
    return res


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gnatlab", description="Curvature experiments on tangent bundles of surfaces.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="JSON experiment configuration")
    ap.add_argument("--out", help="report path (default: outputs.path in the config, else stdout)")
    ap.add_argument("--format", choices=("csv", "json"), help="report format (default: outputs.format)")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"gnatlab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    fmt_ = args.format or cfg.output_format
    out = args.out or cfg.output_path
    try:
        res = run(cfg, args.command)
    except (DomainError, MetricError, GeneratorError, FrameError, NotRiemannianError,
            ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"gnatlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MATH
    meta_text = json.dumps(res.metadata, indent=2, sort_keys=True) + "\n"
    try:
        if fmt_ == "json":
            text = emit_json(res, out)
        else:
            text = emit_csv(res.rows, out)
            if out is not None:
                _write_atomic(f"{out}.meta.json", meta_text)
    except ReportIOError as exc:
        print(f"gnatlab: {exc}", file=sys.stderr)
        return EXIT_MATH
    if out is None:
        sys.stdout.write(text)
        if fmt_ == "csv":
            sys.stderr.write(meta_text)
    return res.status


if __name__ == "__main__":
    sys.exit(main())
