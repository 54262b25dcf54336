"""Command-line front end: ``wck transform | verify | weights | gallery``.

Exit codes: 0 success, 2 usage or parse error, 3 invalid kernel, 4 tolerance breach.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .algebra import KernelError, KernelSpec, bar_transform, tilde_transform, wig_pushforward
from .dsl import DSLError, format_op, format_poly, op, parse_poly2

EXIT_OK, EXIT_USAGE, EXIT_KERNEL, EXIT_TOL = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    N: int | None = None
    L: float | None = None
    tol: float | None = None
    backend: str = "grid"
    out: str | None = None
    seed: int = 0
    format: str = "json"
    timestamp: bool = True

    def __post_init__(self):
        if self.N is not None and (self.N < 8 or self.N > 1024 or self.N & (self.N - 1)):
            raise CliError(f"-N must be a power of two in [8, 1024], got {self.N}")
        if self.L is not None and not self.L > 0:
            raise CliError(f"-L must be positive, got {self.L}")
        if self.tol is not None and not self.tol > 0:
            raise CliError("--tol must be positive")


# helpers ---------------------------------------------------------------------------

def _clean(x):
    """JSON-safe copy: complex -> {re, im}, non-finite floats -> strings, numpy scalars -> python."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": _clean(float(x.real)), "im": _clean(float(x.imag))}
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    return x


def _emit(doc: dict, cfg: RunConfig, rows: list[dict] | None = None) -> None:
    doc = dict(doc)
    doc["config"] = asdict(cfg)
    doc["version"] = __version__
    if cfg.timestamp:
        doc["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    if cfg.format == "csv":
        if rows is None:
            raise CliError("this command has no CSV form")
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else ["empty"], lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: json.dumps(_clean(v)) if isinstance(v, (dict, list)) else _clean(v)
                        for k, v in r.items()})
        text = buf.getvalue()
    else:
        text = json.dumps(_clean(doc), sort_keys=True, indent=2) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_op(text: str, flag: str):
    try:
        return op(text)
    except DSLError as e:
        raise CliError(_located(e, text, flag)) from None


def _parse_poly(text: str, flag: str):
    try:
        return parse_poly2(text)
    except DSLError as e:
        raise CliError(_located(e, text, flag)) from None


def _located(e: DSLError, text: str, flag: str) -> str:
    off = getattr(e, "offset", None)
    if off is None:
        return f"{flag}: {e}"
    return f"{flag}: {e}\n  {text}\n  {' ' * off}^"


def _kernel(P_text: str, q_text: str, seed: int) -> KernelSpec:
    P, q = _parse_poly(P_text, "--P"), _parse_poly(q_text, "--q")
    try:
        ker = KernelSpec(P, q)
    except ValueError as e:
        raise CliError(str(e), EXIT_KERNEL) from None
    try:
        ker.validate(seed=seed)
    except KernelError as e:
        raise CliError(str(e), EXIT_KERNEL) from None
    return ker


def _cfg(args) -> RunConfig:
    return RunConfig(N=getattr(args, "N", None), L=getattr(args, "L", None), tol=getattr(args, "tol", None),
                     backend=getattr(args, "backend", "grid"), out=args.out, seed=args.seed,
                     format=args.format, timestamp=not args.no_timestamp)


# commands --------------------------------------------------------------------------

def cmd_transform(args) -> int:
    cfg = _cfg(args)
    B = _parse_op(args.op, "--op")
    if args.which == "pushforward":
        ker = None
        out = wig_pushforward(B)
    else:
        ker = _kernel(args.P, args.q, cfg.seed)
        out = tilde_transform(B, ker) if args.which == "tilde" else bar_transform(B, ker)
    doc = {"command": "transform", "which": args.which, "op": format_op(B),
           "P": None if ker is None else format_poly(ker.P),
           "q": None if ker is None else format_poly(ker.q),
           "result": format_op(out), "terms": out.to_json()}
    rows = [dict(m=t["m"], n=t["n"], h=t["h"], k=t["k"], re=t["re"], im=t["im"]) for t in out.to_json()]
    _emit(doc, cfg, rows)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import SUITES, MatrixConfig, run_suite

    cfg = _cfg(args)
    if args.suite not in SUITES:
        raise CliError(f"unknown suite {args.suite!r}")
    tol = cfg.tol if cfg.tol is not None else 1e-6
    phases = factors = None
    if args.P is not None or args.q is not None:
        ker = _kernel(args.P or "0", args.q or "1", cfg.seed)
        phases, factors = {args.P or "0": ker.P}, {args.q or "1": ker.q}
    ops = None
    if args.op is not None:
        ops = {args.op: _parse_op(args.op, "--op")}
    backends = ("grid", "exact") if cfg.backend == "both" else (cfg.backend,)
    reports = []
    for be in backends:
        mc = MatrixConfig(backend=be, N=cfg.N or 256, L=cfg.L or 12.0, tol=tol, phases=phases,
                          factors=factors, operators=ops,
                          auto_grid=cfg.N is None and cfg.L is None)
        reports += run_suite(args.suite, mc)
    rows = [r.to_json() for r in reports]
    worst = max(rows, key=lambda r: r["rel_residual"]) if rows else None
    ok = all(r["passed"] for r in rows)
    doc = {"command": "verify", "suite": args.suite, "tol": tol, "cases": len(rows),
           "passed": ok, "worst": worst, "reports": rows}
    _emit(doc, cfg, [{k: v for k, v in r.items()} for r in rows])
    if not ok:
        print(f"tolerance breach: worst case {worst['name']} {worst['operator']} P={worst['P']} "
              f"q={worst['q']} w={worst['w']} rel={worst['rel_residual']:.3e}", file=sys.stderr)
        return EXIT_TOL
    return EXIT_OK


_SEMINORM_INPUTS = ("gaussian", "xgaussian", "decoy")


def _seminorm_input(name: str):
    from .poly import Poly
    from .polygauss import PolyGauss
    from .seminorms import Rational

    if name == "gaussian":
        return PolyGauss.gaussian()
    if name == "xgaussian":
        return PolyGauss.gaussian(Poly.var(0, 2))
    if name == "decoy":
        return Rational.decoy()
    raise CliError(f"unknown --u {name!r}; choose from {_SEMINORM_INPUTS}")


def _floats(text: str, flag: str) -> list[float]:
    try:
        if ":" in text:
            a, b, n = text.split(":")
            return [float(v) for v in np.linspace(float(a), float(b), int(n))]
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise CliError(f"{flag}: expected a comma list or start:stop:count, got {text!r}") from None


def cmd_weights(args) -> int:
    import warnings

    from . import weights as W
    from .seminorms import seminorm

    cfg = _cfg(args)
    try:
        wf = W.get_weight(args.weight)
    except (KeyError, ValueError) as e:
        raise CliError(f"unknown weight id {args.weight!r}: {e}") from None
    if args.action == "check":
        rep = W.check_conditions(wf)
        d = rep.to_json()
        doc = {"command": "weights", "action": "check", "weight": wf.id, "report": d}
        _emit(doc, cfg, [d])
        return EXIT_OK
    if args.action == "conjugate":
        svals = _floats(args.s, "--s")
        phi = W.young_conjugate(wf, np.array(svals))
        rows = []
        for s, v in zip(svals, phi):
            row = {"s": s, "phi_star": float(v)}
            closed = _closed_conjugate(wf, s)
            if closed is not None:
                row["closed_form"] = closed
                row["abs_error"] = abs(float(v) - closed) if math.isfinite(closed) else (
                    0.0 if v == closed else math.inf)
            rows.append(row)
        doc = {"command": "weights", "action": "conjugate", "weight": wf.id, "table": rows}
        _emit(doc, cfg, rows)
        return EXIT_OK
    u = _seminorm_input(args.u)
    if args.system not in range(1, 7):
        raise CliError("--system must be 1..6")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        rep = seminorm(u, wf, args.system, lam=args.lam, mu=args.mu, K=args.K, label=args.u)
    d = rep.to_json()
    doc = {"command": "weights", "action": "seminorm", "weight": wf.id, "report": d}
    _emit(doc, cfg, [{"alpha": e["alpha"], "beta": e["beta"], "value": e["value"]} for e in rep.entries])
    return EXIT_OK


def _closed_conjugate(wf, s: float) -> float | None:
    from . import weights as W

    if wf.normalized:
        return None
    if wf.name == "classical":
        return W.classical_conjugate_closed(s)
    if wf.name.startswith("gevrey:"):
        return W.gevrey_conjugate_closed(s, wf.params["s"])
    return None


def cmd_gallery(args) -> int:
    from .gallery import (BUILDERS, HypoParams, build, hypo_check, twisted_residual, twisted_solve)
    from .grid import Grid2

    cfg = _cfg(args)
    if args.name not in BUILDERS:
        raise CliError(f"unknown example {args.name!r}; choose from {sorted(BUILDERS)}")
    params = {}
    accepted = {"ex1": ("b", "P"), "HO1": ("P",), "HO2": ("Q", "R"), "HO3": ("Q", "R"),
                "airy": ("alpha", "m", "P"), "twisted": (), "harmonic2d": ()}[args.name]
    for key in ("b", "P", "Q", "R", "alpha", "m"):
        val = getattr(args, key)
        if val is None:
            continue
        if key not in accepted:
            raise CliError(f"--{key} does not apply to {args.name}")
        params[key] = complex(val.replace("i", "j")) if key == "alpha" else (int(val) if key == "m" else val)
    try:
        ex = build(args.name, **params)
    except DSLError as e:
        raise CliError(str(e)) from None
    except ValueError as e:
        raise CliError(str(e)) from None
    if args.action == "show":
        doc = {"command": "gallery", "action": "show", "example": ex.to_json(),
               "terms": ex.form.to_json(), "roundtrip": ex.roundtrip()}
        _emit(doc, cfg, [{"name": ex.name, "form": format_op(ex.form)}])
        return EXIT_OK
    if args.action == "hypo":
        hp = HypoParams(m_prime=args.m_prime, seed=cfg.seed)
        v = hypo_check(ex.form, hp)
        doc = {"command": "gallery", "action": "hypo", "example": ex.name, "verdict": v.to_json()}
        _emit(doc, cfg, v.c_per_shell)
        return EXIT_OK
    if ex.name != "twisted":
        raise CliError(f"action 'solve' is only available for 'twisted', not {ex.name!r}")
    N, L = cfg.N or 64, cfg.L or 8.0
    try:
        f = Grid2.sample(lambda x, y: np.exp(-(x * x + y * y) / 2), N, L)
        u = twisted_solve(f)
    except ValueError as e:
        raise CliError(str(e)) from None
    res = twisted_residual(f, u)
    tol = cfg.tol if cfg.tol is not None else 1e-2
    doc = {"command": "gallery", "action": "solve", "example": "twisted", "N": N, "L": L,
           "f": "exp(-(x^2+y^2)/2)", "residual": res, "tol": tol, "passed": res <= tol,
           "meta": u.meta}
    _emit(doc, cfg, [{"N": N, "L": L, "residual": res}])
    return EXIT_OK if res <= tol else EXIT_TOL


# parser ----------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, grid: bool = False) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--no-timestamp", action="store_true")
    if grid:
        p.add_argument("-N", type=int)
        p.add_argument("-L", type=float)
        p.add_argument("--tol", type=float)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wck", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform", help="push an operator through Wig or Q")
    p.add_argument("--op", required=True)
    p.add_argument("--P", default="0")
    p.add_argument("--q", default="1")
    p.add_argument("--which", choices=("bar", "tilde", "pushforward"), default="tilde")
    _common(p)
    p.set_defaults(fn=cmd_transform)

    p = sub.add_parser("verify", help="run intertwining residual suites")
    p.add_argument("--suite", default="all", choices=("wigner", "cohen", "sigma1", "all"))
    p.add_argument("--P")
    p.add_argument("--q")
    p.add_argument("--op")
    p.add_argument("--backend", choices=("grid", "exact", "both"), default="grid")
    _common(p, grid=True)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("weights", help="weight conditions, Young conjugates and seminorms")
    p.add_argument("weight")
    p.add_argument("action", choices=("check", "conjugate", "seminorm"))
    p.add_argument("--s", default="0:20:21")
    p.add_argument("--u", default="gaussian")
    p.add_argument("--system", type=int, default=6)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--mu", type=float)
    p.add_argument("-K", type=int, default=20)
    _common(p)
    p.set_defaults(fn=cmd_weights)

    p = sub.add_parser("gallery", help="example operators")
    p.add_argument("name")
    p.add_argument("action", choices=("show", "hypo", "solve"))
    for flag in ("b", "P", "Q", "R", "alpha", "m"):
        p.add_argument(f"--{flag}")
    p.add_argument("--m-prime", type=float, default=0.0)
    _common(p, grid=True)
    p.set_defaults(fn=cmd_gallery)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CliError as e:
        print(f"wck: error: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
