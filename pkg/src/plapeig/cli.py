"""Command-line interface: ``plapeig <command> [options]``.

Exit codes: 0 success, 1 verification failure, 2 invalid input,
3 solver non-convergence.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analytic_p4, shooting
from .errors import InvalidInput, InvalidParameter, MissingEigenResult, PLapError, SolverError
from .model import EigenResult, GridFunction, ProblemParams
from .optim import OptimizerSettings
from .psine import PSineFunction
from .quadrature import QuadratureSpec, pi_4, pi_p_lambda
from .rootfn import minimize_root
from .store import CsvTable, dump_json, load_result, parse_grid, result_to_dict
from .variational import minimize_on_sphere

__all__ = ["RunConfig", "main", "build_parser", "run_disp", "run_wave", "run_verify"]

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3
COMMANDS = ("pi", "sinp", "eig", "disp", "kset", "minimize", "rootfn", "wave", "verify")
DISP_HEADER = ["n", "k", "lambda", "residual", "solver"]


@dataclass
class RunConfig:
    command: str
    params: ProblemParams
    sweep: np.ndarray | None = None
    output_path: Path | None = None
    format: str = "csv"
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    tol: float = 1e-10
    seed: int = 0
    jobs: int = 1
    extra: dict = field(default_factory=dict)


class PartialOutput(Exception):
    """A sweep failed after producing some rows."""

    def __init__(self, text: str, cause: PLapError):
        super().__init__(str(cause))
        self.text = text
        self.cause = cause


# -- argument parsing --------------------------------------------------------


def _common(sp):
    sp.add_argument("--config", help="key=value file; flags override it")
    sp.add_argument("-o", "--output", help="output file (default: stdout)")
    sp.add_argument("--format", choices=("csv", "json"))
    sp.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, default=1e-10, help="solver tolerance")
    sp.add_argument("--quad-rel-tol", type=float, default=1e-10)


def _physics(sp, p=None, lam=True, k=True):
    sp.add_argument("--p", type=float, default=p, required=p is None)
    if k:
        sp.add_argument("--k", type=float, default=0.0)
    if lam:
        sp.add_argument("--lambda", dest="lam", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plapeig", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("pi", help="half-period pi_p(lam) or pi_4(lam, k)")
    _common(sp)
    _physics(sp)

    sp = sub.add_parser("sinp", help="sample the generalized sine and its derivative")
    _common(sp)
    _physics(sp)
    sp.add_argument("--x-grid", default="0:1:101")

    sp = sub.add_parser("eig", help="one eigen-pair lam_n(k)")
    _common(sp)
    _physics(sp, lam=False)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--solver", choices=("shooting", "analytic4"), default="shooting")

    sp = sub.add_parser("disp", help="dispersion curve lam_n(k) over a k grid")
    _common(sp)
    _physics(sp, lam=False)
    sp.add_argument("--k-grid")
    sp.add_argument("--n", default="1", help="mode index or comma list")

    sp = sub.add_parser("kset", help="all k with (lam, k) an eigen-pair, p = 4")
    _common(sp)
    _physics(sp, p=4.0, k=False)
    sp.add_argument("--lambda-grid")

    sp = sub.add_parser("minimize", help="ground state of E on the L2 sphere")
    _common(sp)
    _physics(sp)
    sp.add_argument("--n-cells", type=int, default=128)
    sp.add_argument("--opt-tol", type=float, default=1e-9)

    sp = sub.add_parser("rootfn", help="ground-state level of the root functional")
    _common(sp)
    _physics(sp, k=False)
    sp.add_argument("--n-cells", type=int, default=512)
    sp.add_argument("--opt-tol", type=float, default=1e-9)

    sp = sub.add_parser("wave", help="sample v(t,x,y) = exp(i(wt - ky)) u(x)")
    _common(sp)
    sp.add_argument("--input", help="eigen-result JSON written by eig or minimize")
    sp.add_argument("--p", type=float)
    sp.add_argument("--k", type=float, default=0.0)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--t-grid", default="0:1:3")
    sp.add_argument("--x-grid")
    sp.add_argument("--y-grid", default="0:1:3")

    sp = sub.add_parser("verify", help="cross-module verification report")
    _common(sp)
    return ap


def read_config(path: str) -> dict:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameter(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _config_path(argv):
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if a.startswith("--config="):
            return a.split("=", 1)[1]
    return None


def parse_args(argv) -> argparse.Namespace:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    path = _config_path(argv)
    command = next((a for a in argv if a in COMMANDS), None)
    if path and command:
        try:
            cfg = read_config(path)
        except OSError as exc:
            raise InvalidParameter(f"cannot read config: {exc}") from exc
        sub = ap._subparsers._group_actions[0].choices[command]
        actions = {a.dest: a for a in sub._actions}
        if "lambda" in cfg:
            cfg["lam"] = cfg.pop("lambda")
        defaults = {}
        for key, value in cfg.items():
            if key not in actions or key in ("config", "help"):
                raise InvalidParameter(f"unknown config key {key!r} for {command}")
            conv = actions[key].type or str
            try:
                defaults[key] = conv(value)
            except ValueError as exc:
                raise InvalidParameter(f"config key {key!r}: {exc}") from exc
        sub.set_defaults(**defaults)
        for a in sub._actions:
            if a.dest in defaults:
                a.required = False
    return ap.parse_args(argv)


def make_config(args) -> RunConfig:
    p = getattr(args, "p", None)
    params = ProblemParams(p if p is not None else 2.0, getattr(args, "k", 0.0) or 0.0,
                           getattr(args, "lam", 0.0) or 0.0)
    if not args.tol > 0 or not args.quad_rel_tol > 0:
        raise InvalidParameter("tolerances must be positive")
    if args.jobs < 1:
        raise InvalidParameter("--jobs must be >= 1")
    fmt = args.format or ("json" if args.command in ("eig", "minimize", "rootfn", "verify", "pi")
                          else "csv")
    return RunConfig(
        command=args.command,
        params=params,
        output_path=Path(args.output) if args.output else None,
        format=fmt,
        quad=QuadratureSpec(rel_tol=args.quad_rel_tol),
        tol=args.tol,
        seed=args.seed,
        jobs=args.jobs,
        extra=vars(args),
    )


# -- commands -----------------------------------------------------------------


def _pi(cfg: RunConfig) -> str:
    p, k, lam = cfg.params.p, cfg.params.k, cfg.params.lam
    if k != 0.0 and p != 4.0:
        raise InvalidParameter("k != 0 requires p = 4")
    v = pi_4(lam, k, cfg.quad) if k != 0.0 else pi_p_lambda(p, lam, cfg.quad)
    rec = {"p": p, "lambda": lam, "k": k, "value": v.value, "estimated_error": v.estimated_error}
    if cfg.format == "json":
        return dump_json(rec)
    t = CsvTable(list(rec))
    t.add(*rec.values())
    return t.render()


def _sinp(cfg: RunConfig) -> str:
    p, k, lam = cfg.params.p, cfg.params.k, cfg.params.lam
    fn = PSineFunction(p, lam, k, spec=cfg.quad)
    xs = parse_grid(cfg.extra["x_grid"])
    t = CsvTable(["x", "u", "uprime"])
    for x in xs:
        t.add(x, fn.eval(x), fn.eval_derivative(x))
    t.comments.append(f"half_period={fn.half_period:.17g} amplitude={fn.amplitude:.17g}")
    return t.render()


def _analytic_result(k, n, n_cells=1024, quad=None) -> EigenResult:
    pt = analytic_p4.lambda_n(k, n, spec=quad)
    fn = analytic_p4.eigenfunction(pt)
    u = GridFunction.from_function(fn, n_cells)
    return EigenResult(ProblemParams(4.0, pt.k, pt.lam), u, n, pt.residual,
                       bool(np.all(u.values > 0)), {"solver": "analytic4"})


def _eig_result(cfg: RunConfig) -> EigenResult:
    p, k = cfg.params.p, cfg.params.k
    n = cfg.extra["n"]
    if cfg.extra.get("solver") == "analytic4":
        if p != 4.0:
            raise InvalidParameter("the analytic4 solver needs p = 4")
        return _analytic_result(k, n, quad=cfg.quad)
    return shooting.eigenvalue(p, k, n, tol=cfg.tol)


def _render_result(res: EigenResult, fmt: str) -> str:
    if fmt == "json":
        return dump_json(result_to_dict(res))
    t = CsvTable(["x", "u"])
    for x, u in zip(res.u.x, res.u.full):
        t.add(x, u)
    return t.render()


def _eig(cfg):
    return _render_result(_eig_result(cfg), cfg.format)


def _minimize(cfg):
    p, k, lam = cfg.params.p, cfg.params.k, cfg.params.lam
    opt = OptimizerSettings(tol=cfg.extra["opt_tol"])
    return _render_result(minimize_on_sphere(p, k, lam, cfg.extra["n_cells"], opt), cfg.format)


def _rootfn(cfg):
    p, lam = cfg.params.p, cfg.params.lam
    opt = OptimizerSettings(tol=cfg.extra["opt_tol"])
    ext = minimize_root(p, lam, cfg.extra["n_cells"], opt)
    if not ext.nu ** (0.5 * p) < lam:
        raise SolverError(f"level nu={ext.nu} violates nu^(p/2) < lambda")
    rec = {"p": p, "lambda": lam, "nu": ext.nu, "k": ext.k, "residual": ext.residual,
           "iterations": ext.iterations, "seed_mode": ext.seed, "n_cells": ext.u.n_cells}
    if cfg.format == "json":
        return dump_json(rec)
    t = CsvTable(list(rec))
    t.add(*rec.values())
    return t.render()


# each task returns a list of (n, k, lambda, residual, solver) rows


def _task_lambda_n(p, k, n, tol, rel_tol):
    rows = []
    if p == 4.0:
        pt = analytic_p4.lambda_n(k, n, spec=QuadratureSpec(rel_tol=rel_tol))
        rows.append((n, pt.k, pt.lam, pt.residual, "analytic4"))
    res = shooting.eigenvalue(p, k, n, tol=tol)
    rows.append((n, abs(k), res.params.lam, res.weak_residual, "shooting"))
    return rows


def _task_k_set(lam, tol, rel_tol):
    rows = []
    for pt in analytic_p4.k_set(lam, spec=QuadratureSpec(rel_tol=rel_tol)):
        rows.append((pt.n, pt.k, pt.lam, pt.residual, "analytic4"))
        res = shooting.eigenvalue(4.0, pt.k, pt.n, tol=tol)
        rows.append((pt.n, pt.k, res.params.lam, res.weak_residual, "shooting"))
    return rows


def _run_tasks(fn, arglist, jobs):
    """Run tasks; returns (rows, first error or None). Row order is canonicalized later."""
    rows, error = [], None
    if jobs == 1 or len(arglist) == 1:
        for a in arglist:
            try:
                rows.extend(fn(*a))
            except PLapError as exc:
                error = error or exc
        return rows, error
    with ProcessPoolExecutor(max_workers=min(jobs, len(arglist))) as pool:
        futures = [pool.submit(fn, *a) for a in arglist]
        for f in futures:
            try:
                rows.extend(f.result())
            except PLapError as exc:
                error = error or exc
    return rows, error


def _disp_table(rows, p) -> CsvTable:
    rows = sorted(rows, key=lambda r: (r[0], r[1], r[4]))
    t = CsvTable(DISP_HEADER)
    for r in rows:
        n, k, lam = r[0], r[1], r[2]
        if not abs(k) ** p < lam:
            raise SolverError(f"row (n={n}, k={k}, lambda={lam}) violates k^p < lambda")
        t.add(*r)
    by_key = {}
    for r in rows:
        by_key.setdefault((r[0], r[1]), {})[r[4]] = r[2]
    for (n, k), sol in by_key.items():
        if "analytic4" in sol and "shooting" in sol:
            a, s = sol["analytic4"], sol["shooting"]
            t.comments.append(f"cross n={n} k={k:.17g} rel={abs(s - a) / a:.3e}")
    return t


def run_disp(cfg: RunConfig) -> str:
    """Dispersion table for ``disp`` (k sweep) or ``kset`` (lambda sweep)."""
    p = cfg.params.p
    rel = cfg.quad.rel_tol
    if cfg.command == "kset":
        if p != 4.0:
            raise InvalidParameter("kset is available for p = 4 only")
        lams = cfg.sweep if cfg.sweep is not None else np.array([cfg.params.lam])
        rows, error = _run_tasks(_task_k_set, [(float(l), cfg.tol, rel) for l in lams], cfg.jobs)
    else:
        ks = cfg.sweep if cfg.sweep is not None else np.array([cfg.params.k])
        try:
            ns = [int(s) for s in str(cfg.extra["n"]).split(",")]
        except ValueError as exc:
            raise InvalidParameter(f"bad mode list {cfg.extra['n']!r}") from exc
        if min(ns) < 1:
            raise InvalidParameter("mode indices must be >= 1")
        args = [(p, float(k), n, cfg.tol, rel) for n in ns for k in ks]
        rows, error = _run_tasks(_task_lambda_n, args, cfg.jobs)
    table = _disp_table(rows, p)
    if error is not None:
        table.comments.append("status=partial")
        raise PartialOutput(table.render(), error)
    return table.render()


def run_wave(cfg: RunConfig) -> str:
    ex = cfg.extra
    if ex.get("input"):
        res = load_result(ex["input"])
    elif ex.get("p") is not None:
        res = shooting.eigenvalue(ex["p"], ex["k"], ex["n"], tol=cfg.tol)
    else:
        raise MissingEigenResult("wave needs --input FILE or --p/--k/--n to solve inline")
    w, k = res.params.w, res.params.k
    ts = parse_grid(ex["t_grid"])
    ys = parse_grid(ex["y_grid"])
    xs = parse_grid(ex["x_grid"]) if ex.get("x_grid") else res.u.x
    ux = res.u(xs)
    t = CsvTable(["t", "x", "y", "re_v", "im_v"])
    for tt in ts:
        for yy in ys:
            theta = w * tt - k * yy
            c, s = math.cos(theta), math.sin(theta)
            for x, u in zip(xs, ux):
                t.add(tt, x, yy, c * u, s * u)
    return t.render()


def run_verify(cfg: RunConfig) -> tuple[str, bool]:
    from .verify import run_checks

    report = run_checks(cfg.seed)
    return dump_json(report), report["passed"]


# -- entry point ----------------------------------------------------------------


def _emit(text: str, path: Path | None):
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        path.write_text(text, encoding="utf-8", newline="")


def _error_line(exc: BaseException, code: int):
    sys.stderr.write(f"error: code={code} type={type(exc).__name__} message={exc}\n")


def execute(cfg: RunConfig) -> int:
    ex = cfg.extra
    if cfg.command == "disp" and ex.get("k_grid"):
        cfg.sweep = parse_grid(ex["k_grid"])
    if cfg.command == "kset" and ex.get("lambda_grid"):
        cfg.sweep = parse_grid(ex["lambda_grid"])
    handlers = {"pi": _pi, "sinp": _sinp, "eig": _eig, "minimize": _minimize,
                "rootfn": _rootfn, "wave": run_wave, "disp": run_disp, "kset": run_disp}
    if cfg.command == "verify":
        text, ok = run_verify(cfg)
        _emit(text, cfg.output_path)
        return EXIT_OK if ok else EXIT_VERIFY
    _emit(handlers[cfg.command](cfg), cfg.output_path)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        cfg = make_config(parse_args(argv))
        return execute(cfg)
    except PartialOutput as exc:
        _emit(exc.text, cfg.output_path)
        code = EXIT_INPUT if isinstance(exc.cause, InvalidInput) else EXIT_SOLVER
        _error_line(exc.cause, code)
        return code
    except (InvalidInput, MissingEigenResult) as exc:
        _error_line(exc, EXIT_INPUT)
        return EXIT_INPUT
    except SolverError as exc:
        _error_line(exc, EXIT_SOLVER)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
