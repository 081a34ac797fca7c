"""Batch verification front end.

Exit status: 0 if every check passed, 1 on any failure, 2 on a configuration
error, 3 if nothing failed but some certified comparison stayed undecided.
The report file is written for exit codes 0, 1 and 3.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import __version__
from .exactnum import ENum, Ival, fmt_rat, rat
from .exppoly import ExpPoly, euler_eval, improper_integral
from .hilbert import (
    HilbertInstance,
    check_Ar_power,
    fake_lm,
    growth_separation,
    hilbert_report,
    verify_euler_numeric,
)
from .props import SUITES, run_suite
from .rational import (
    BBRInstance,
    build_vtable,
    check_combination,
    check_divisibility,
    check_dual_construction,
    check_growth_items,
    check_ode_identity,
    check_ur_identity,
    check_vk_power_path,
    check_vk_recurrence,
    least_k0,
    norm_induction,
    window_constant,
)
from .series import Poly
from .verdict import Status, Verdict

OUT_DIR_ENV = "SEMIFORMAL_OUT_DIR"
REPORT_VERSION = "1"

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_UNDECIDED = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    seed: int = 42
    cases: int = 100
    max_n: int = 200
    max_k: int = 12
    max_r: int = 8
    max_euler_k: int = 15
    exact_k: int = 200
    eps: Fraction = Fraction(1, 10**8)
    coeffs: tuple[int, ...] = (2, -1)
    b: tuple[int, ...] = (1,)
    alpha: tuple[int, ...] = (1,)
    ur_max_r: int = 4
    output: Path | None = None
    format: str = "json"
    emit_tables: Path | None = None
    jobs: int = 1
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        for name in ("cases", "max_n", "max_k", "max_r", "max_euler_k", "exact_k", "jobs"):
            if getattr(self, name) < 1:
                raise ConfigError(f"--{name.replace('_', '-')} must be positive")
        if self.eps <= 0:
            raise ConfigError("--eps must be positive")
        if self.format not in ("json", "csv"):
            raise ConfigError("--format must be json or csv")

    def echo(self) -> dict:
        return {
            "command": self.command,
            "seed": self.seed,
            "cases": self.cases,
            "max_n": self.max_n,
            "max_k": self.max_k,
            "max_r": self.max_r,
            "max_euler_k": self.max_euler_k,
            "exact_k": self.exact_k,
            "eps": fmt_rat(self.eps),
            "coeffs": list(self.coeffs),
            "b": list(self.b),
            "alpha": list(self.alpha),
            "ur_max_r": self.ur_max_r,
            "format": self.format,
        }


def _int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"malformed integer list {text!r}") from None
    if not values:
        raise ConfigError(f"empty integer list {text!r}")
    return values


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, Status):
        return obj.value
    if isinstance(obj, Fraction):
        return fmt_rat(obj)
    if isinstance(obj, (ENum, Ival, Poly, ExpPoly)):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    return obj


def _record(check_id: str, ref: str, v: Verdict) -> dict:
    return {
        "id": check_id,
        "name": v.name,
        "paper_ref": ref,
        "status": v.status.value,
        "pass": v.ok,
        "detail": _jsonable(v.detail),
    }


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def run_props(cfg: RunConfig) -> dict:
    checks = []
    for name, (ref, _) in SUITES.items():
        checks.append(_record(f"props/{name}", ref, run_suite(name, cfg.seed, cfg.cases)))
    return {"checks": checks, "seed": cfg.seed}


def _points(step: int, count: int) -> list[int]:
    return [step * i for i in range(1, count + 1)]


def run_euler(cfg: RunConfig) -> dict:
    checks = []
    bad = []
    for k in range(cfg.exact_k + 1):
        fk = math.factorial(k)
        if euler_eval(Poly.monomial(k)) != fk or improper_integral(ExpPoly.x_pow_exp(k, -1), 0) != fk:
            bad.append(k)
    checks.append(
        _record(
            "euler/exact",
            "int_0^oo x^k Exp(-x) = k!",
            Verdict.of("euler_exact", not bad, max_k=cfg.exact_k, failures=bad[:10]),
        )
    )
    primary, alternate = _points(5, 10), _points(7, 7)
    for k in range(cfg.max_euler_k + 1):
        tol = Fraction(1, 10**6) * max(1, math.factorial(k))
        v = verify_euler_numeric(k, primary, tol, alternate)
        checks.append(_record(f"euler/numeric/k={k:03d}", "int_0^b x^k Exp(-x) -> k! as b -> oo", v))
    for i in range(7):
        for k in range(13):
            checks.append(_record(f"euler/fake_lm/i={i}/k={k:02d}", "|int_0^i x^k Exp(-x)| <= i^(k+1) e^i", fake_lm(i, k)))
    return {"checks": checks}


def _hilbert_row(args):
    coeffs, r, eps = args
    report, verdicts = hilbert_report(HilbertInstance(coeffs), r, eps)
    return report, verdicts


HILBERT_REFS = {
    "Br_structure": "r! | B_r, B_r = +-a_0 (n!)^(r+1) r! mod (r+1)!, B_r != 0 when gcd(r+1, a_0 n!) = 1",
    "decomposition": "A_r + B_r = P I_r",
    "Ar_bound": "|A_r| <= sum |a_i| e^i (n+1)(r+1) l^(r+1) n^((n+1)(r+1)) e^n",
}


def run_hilbert(cfg: RunConfig) -> dict:
    inst = HilbertInstance(cfg.coeffs)
    tag = ",".join(str(x) for x in cfg.coeffs)
    rs = list(range(1, cfg.max_r + 1))
    jobs = [(cfg.coeffs, r, cfg.eps) for r in rs]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            results = list(pool.map(_hilbert_row, jobs))
    else:
        results = [_hilbert_row(j) for j in jobs]
    checks, reports = [], []
    for r, (report, verdicts) in zip(rs, results):
        reports.append(report.to_json())
        for v in verdicts:
            key = v.name.rsplit("_r", 1)[0]
            checks.append(_record(f"hilbert/a={tag}/r={r:03d}/{key}", HILBERT_REFS[key], v))
    checks.append(_record(f"hilbert/a={tag}/power_bound", "|A_r| <= c^r", check_Ar_power(inst, rs, cfg.eps)))
    checks.append(
        _record(f"hilbert/a={tag}/growth_separation", "r! | B_r != 0 infinitely often vs |A_r| <= c^r", growth_separation(inst, rs, cfg.eps))
    )
    return {"instance": {"a": list(cfg.coeffs), "n": inst.n}, "checks": checks, "reports": reports}


def run_bbr(cfg: RunConfig) -> dict:
    inst = BBRInstance(cfg.b, cfg.alpha)
    N, K = cfg.max_n, cfg.max_k
    tab = build_vtable(inst, N, K)
    tag = f"b={','.join(map(str, inst.b))}/alpha={','.join(map(str, inst.alpha))}"
    verdicts: list[tuple[str, str, Verdict]] = [
        ("dual_construction", "v_n = n! sum_{r<=n} u_r/r! = n v_{n-1} + u_n", check_dual_construction(tab, inst)),
        ("vk_recurrence", "v_n(k+1) = v_n(k) - a_1 v_{n-1}(k) - ... - a_t v_{n-t}(k)", check_vk_recurrence(tab, inst)),
        ("vk_power_path", "sum v_n(k) x^n = q(x)^k V(x)", check_vk_power_path(tab, inst)),
        ("divisibility", "k! | v_n(k) for n >= tk", check_divisibility(tab, inst)),
        ("ode_identity", "(1-x)V - x^2 V' = sum b_j/(1 - alpha_j x)", check_ode_identity(inst, N, tab)),
    ]
    for k in range(1, K + 1):
        verdicts.append(
            (f"combination/k={k:03d}", "v_n = sum_{r<k} (n)_r u_{n-r} + (n)_k v_{n-k}", check_combination(tab, k))
        )
    for r in range(cfg.ur_max_r + 1):
        if N >= inst.t * (r + 1) + r:
            verdicts.append(
                (f"ur_identity/r={r:03d}", "sum (n)_r u_{n-r} x^n = p_r(x)/q(x)^(r+1), deg p_r < t(r+1)", check_ur_identity(inst, r, N))
            )
    growth = check_growth_items(tab, inst)
    verdicts.append(("growth_implication", "|v_n(k)| <= c A^n C^k given |v_n| <= c A^n", growth))
    # informational: genuine data does not vanish on the N-region, so the induction cannot start
    c = window_constant(tab, inst.A)
    k0 = least_k0(c, inst.A, inst.C, inst.t)
    induction = norm_induction(inst.t, 1, None, tab)
    checks = [_record(f"bbr/{tag}/{name}", ref, v) for name, ref, v in verdicts]
    info = {
        "norm_induction": _jsonable(induction.detail) | {"status": induction.status.value},
        "k0_for_window_c": k0,
        "c_window": fmt_rat(c),
    }
    out = {"instance": inst.to_json(), "N": N, "K": K, "checks": checks, "info": info}
    out["v_prefix"] = [str(x) for x in tab.v[:10]]
    out["_table"] = tab
    return out


def run_all(cfg: RunConfig) -> dict:
    parts = [run_props(cfg), run_euler(cfg)]
    for coeffs in ((2, -1), (1, -3, 1)):
        sub = RunConfig(**{**cfg.__dict__, "command": "hilbert", "coeffs": coeffs, "max_r": 8})
        parts.append(run_hilbert(sub))
    for b, alpha, N, K in (((1,), (1,), 200, 12), ((1, 1), (1, 2), 150, 8)):
        sub = RunConfig(**{**cfg.__dict__, "command": "bbr", "b": b, "alpha": alpha, "max_n": N, "max_k": K})
        parts.append(run_bbr(sub))
    checks = [c for p in parts for c in p["checks"]]
    return {"checks": checks}


COMMANDS = {"props": run_props, "euler": run_euler, "hilbert": run_hilbert, "bbr": run_bbr, "all": run_all}


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def exit_code(checks: list[dict]) -> int:
    statuses = {c["status"] for c in checks}
    if Status.FAIL.value in statuses:
        return EXIT_FAIL
    if Status.UNDECIDED.value in statuses:
        return EXIT_UNDECIDED
    return EXIT_OK


def render(cfg: RunConfig, result: dict) -> str:
    result = {k: v for k, v in result.items() if not k.startswith("_")}
    result["checks"] = sorted(result["checks"], key=lambda c: c["id"])
    if cfg.format == "json":
        doc = {"version": REPORT_VERSION, "tool_version": __version__, "config_echo": cfg.echo(), **result}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if cfg.command == "hilbert":
        writer.writerow(["r", "B_r", "B_r_residue", "A_r_lo", "A_r_hi", "identity_ok", "bound_c"])
        for rep in result["reports"]:
            lo, hi = rep["A_r_interval"]
            writer.writerow([rep["r"], rep["B_r"], rep["B_r_residue"], lo, hi, rep["identity_ok"], rep["bound_c"]])
    else:
        writer.writerow(["id", "status", "paper_ref", "detail"])
        for c in result["checks"]:
            writer.writerow([c["id"], c["status"], c["paper_ref"], json.dumps(c["detail"], sort_keys=True)])
    return buf.getvalue()


def table_csv(tab) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "u_n", "v_n"] + [f"v_n({k})" for k in range(1, tab.K + 1)])
    for n in range(tab.N + 1):
        writer.writerow([n, tab.u[n], tab.v[n]] + [tab.vk[k][n] for k in range(1, tab.K + 1)])
    return buf.getvalue()


def default_output(command: str, fmt: str) -> Path:
    base = Path(os.environ.get(OUT_DIR_ENV, "."))
    return base / f"{command}-report.{fmt}"


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semiformal", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--output", "-o", type=Path, help=f"report path (default ${OUT_DIR_ENV}/<command>-report.<fmt>)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--cases", type=int, default=100)
        p.add_argument("--eps", default="1e-8", help="interval width for certified comparisons")
        p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("props", help="randomized suites for the series and integral laws")
    common(p)
    p = sub.add_parser("euler", help="exact and numeric checks of int_0^oo x^k Exp(-x) = k!")
    common(p)
    p.add_argument("--max-k", dest="max_euler_k", type=int, default=15)
    p.add_argument("--exact-k", type=int, default=200)
    p = sub.add_parser("hilbert", help="B_r, A_r and the decomposition A_r + B_r = P I_r")
    common(p)
    p.add_argument("--coeffs", required=True, help="a_0,a_1,...,a_n")
    p.add_argument("--max-r", type=int, default=8)
    p = sub.add_parser("bbr", help="v-table checks for u_n = sum b_j alpha_j^n")
    common(p)
    p.add_argument("--b", required=True, help="b_1,...,b_t")
    p.add_argument("--alpha", required=True, help="alpha_1,...,alpha_t")
    p.add_argument("--max-n", type=int, default=200)
    p.add_argument("--max-k", type=int, default=12)
    p.add_argument("--ur-max-r", type=int, default=4)
    p.add_argument("--emit-tables", type=Path, help="write the v-table as CSV here")
    p = sub.add_parser("all", help="every suite and both pipelines on the reference instances")
    common(p)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    try:
        eps = rat(ns.eps)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"malformed --eps {ns.eps!r}") from None
    cfg = RunConfig(
        command=ns.command,
        seed=ns.seed,
        cases=ns.cases,
        eps=eps,
        output=ns.output,
        format=ns.format,
        jobs=ns.jobs,
    )
    for name in ("max_n", "max_k", "max_r", "max_euler_k", "exact_k", "ur_max_r", "emit_tables"):
        if hasattr(ns, name):
            setattr(cfg, name, getattr(ns, name))
    if hasattr(ns, "coeffs"):
        cfg.coeffs = _int_list(ns.coeffs)
    if hasattr(ns, "b"):
        cfg.b, cfg.alpha = _int_list(ns.b), _int_list(ns.alpha)
    cfg.validate()
    if ns.command == "hilbert":
        try:
            HilbertInstance(cfg.coeffs)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if ns.command == "bbr":
        try:
            inst = BBRInstance(cfg.b, cfg.alpha)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if cfg.max_n < inst.t * cfg.max_k:
            raise ConfigError(f"--max-n must be >= t * --max-k = {inst.t * cfg.max_k}")
    return cfg


def _check_writable(path: Path) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from None
    if path.is_dir() or not os.access(path.parent, os.W_OK) or (path.exists() and not os.access(path, os.W_OK)):
        raise ConfigError(f"cannot write {path}")


def _write(path: Path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from None


def run(cfg: RunConfig) -> int:
    out_path = cfg.output or default_output(cfg.command, cfg.format)
    # fail fast on bad paths, before any expensive work
    _check_writable(out_path)
    if cfg.emit_tables:
        _check_writable(cfg.emit_tables)
    result = COMMANDS[cfg.command](cfg)
    _write(out_path, render(cfg, result))
    if cfg.emit_tables:
        _write(cfg.emit_tables, table_csv(result["_table"]))
    code = exit_code(result["checks"])
    counts = {s.value: sum(c["status"] == s.value for c in result["checks"]) for s in Status}
    print(f"{cfg.command}: {counts['pass']} pass, {counts['fail']} fail, {counts['undecided']} undecided -> {out_path}")
    return code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        return run(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
