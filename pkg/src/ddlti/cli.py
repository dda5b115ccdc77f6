"""Command-line front end.

Subcommands: reldeg, vecreldeg, zerodyn, reconstruct, check-pe, simulate and
verify.  Exit code 0 is a definite verdict, 2 a distinguishable
not-informative/inconclusive outcome and 1 an error.  Reports always carry the
per-theorem condition checklist so an inconclusive verdict shows which
condition failed, plus the tolerances in effect.
"""

from __future__ import annotations

import argparse
import json
import math
import sys as _sys
from dataclasses import asdict, dataclass

import numpy as np

from . import ct as ct_mod
from . import lti, mpum, reldeg, zerodyn
from .errors import DdltiError, NotPersistentlyExcitingError, ParseError
from .hankel import DataSet, Trajectory, is_persistently_exciting
from .linalg import Stability, ToleranceConfig
from .reldeg import RelDegKind, VecRelDegKind

__all__ = ["ingest", "emit_dataset", "pe_input", "AnalysisReport", "main"]

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2


# --- dataset I/O -----------------------------------------------------------------


def _parse_header(header: str):
    names = [c.strip() for c in header.split(",")]
    if not names or names[0] != "t":
        raise ParseError(f"first CSV column must be 't', got {names[:1]}")
    m = sum(1 for c in names[1:] if c.startswith("u"))
    p = sum(1 for c in names[1:] if c.startswith("y"))
    expected = ["t"] + [f"u{i}" for i in range(1, m + 1)] + [f"y{i}" for i in range(1, p + 1)]
    if names != expected or m == 0 or p == 0:
        raise ParseError(f"CSV header must be t,u1..um,y1..yp; got {header.strip()!r}")
    return m, p


def ingest(path: str, format: str | None = None) -> DataSet:
    """Load a dataset from CSV (single sequence) or JSON (multi-sequence)."""
    if format is None:
        format = "json" if str(path).endswith(".json") else "csv"
    if format == "json":
        return _ingest_json(path)
    if format == "csv":
        return _ingest_csv(path)
    raise ParseError(f"unknown dataset format {format!r}")


def _ingest_csv(path: str) -> DataSet:
    with open(path) as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if not lines:
        raise ParseError(f"{path}: empty file")
    m, p = _parse_header(lines[0])
    u_rows, y_rows = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != 1 + m + p:
            raise ParseError(
                f"{path}:{lineno}: expected {1 + m + p} fields, got {len(fields)}"
            )
        try:
            t = int(float(fields[0]))
            values = [float(v) for v in fields[1:]]
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
        if t != lineno - 2:
            raise ParseError(f"{path}:{lineno}: time index {t}, expected {lineno - 2}")
        u_rows.append(values[:m])
        y_rows.append(values[m:])
    return DataSet(m=m, p=p, sequences=[Trajectory(np.array(u_rows), np.array(y_rows))])


def _ingest_json(path: str) -> DataSet:
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from exc
    try:
        sequences = [
            Trajectory(np.array(seq["u"], dtype=float), np.array(seq["y"], dtype=float))
            for seq in payload["sequences"]
        ]
        return DataSet(
            m=int(payload["m"]),
            p=int(payload["p"]),
            sequences=sequences,
            sampling_time=payload.get("sampling_time"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed dataset JSON ({exc})") from exc


def emit_dataset(ds: DataSet, path: str, format: str = "json"):
    """Write a dataset; JSON keeps every sequence, CSV the single sequence."""
    if format == "json":
        payload = {
            "m": ds.m,
            "p": ds.p,
            "sampling_time": ds.sampling_time,
            "sequences": [
                {"u": seq.u.tolist(), "y": seq.y.tolist()} for seq in ds.sequences
            ],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh)
            fh.write("\n")
        return
    if format != "csv":
        raise ParseError(f"unknown dataset format {format!r}")
    if len(ds.sequences) != 1:
        raise ParseError("CSV holds exactly one sequence; use JSON for multi-sequence data")
    seq = ds.sequences[0]
    header = (
        "t,"
        + ",".join(f"u{i}" for i in range(1, ds.m + 1))
        + ","
        + ",".join(f"y{i}" for i in range(1, ds.p + 1))
    )
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for t in range(seq.length):
            row = [str(t)] + [repr(v) for v in seq.u[t]] + [repr(v) for v in seq.y[t]]
            fh.write(",".join(row) + "\n")


# --- deterministic excitation ----------------------------------------------------


def pe_input(T: int, m: int, order: int, seed: int, max_tries: int = 32) -> np.ndarray:
    """Seeded +-1 input sequence, verified persistently exciting of `order`."""
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        u = rng.choice([-1.0, 1.0], size=(T, m))
        probe = DataSet(m=m, p=1, sequences=[Trajectory(u, np.zeros((T, 1)))])
        if is_persistently_exciting(probe, order):
            return u
    raise NotPersistentlyExcitingError(
        f"could not draw a length-{T} input exciting of order {order}; increase the length"
    )


# --- reports -----------------------------------------------------------------------


def _jsonable(value):
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return [[float(v.real), float(v.imag)] for v in value]
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, Stability):
        return value.value
    if isinstance(value, (RelDegKind, VecRelDegKind)):
        return value.value
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


@dataclass
class AnalysisReport:
    """Verdict payload plus the tolerances and condition checklist behind it."""

    command: str
    verdict: dict
    tolerances_used: dict
    conditions: dict
    warnings: list

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "verdict": _jsonable(self.verdict),
            "tolerances_used": _jsonable(self.tolerances_used),
            "conditions": _jsonable(self.conditions),
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_json(cls, payload: dict) -> "AnalysisReport":
        return cls(
            command=payload["command"],
            verdict=payload["verdict"],
            tolerances_used=payload["tolerances_used"],
            conditions=payload["conditions"],
            warnings=list(payload["warnings"]),
        )


def _print_report(report: AnalysisReport, fmt: str):
    if fmt == "json":
        print(json.dumps(report.to_json(), indent=2, sort_keys=True))
        return
    print(f"command: {report.command}")
    for key, value in report.verdict.items():
        print(f"  {key}: {_jsonable(value)}")
    if report.conditions:
        print("conditions:")
        for key, value in report.conditions.items():
            print(f"  {key}: {_jsonable(value)}")
    for warning in report.warnings:
        print(f"warning: {warning}")


# --- argument plumbing ---------------------------------------------------------------


def _add_common(parser):
    parser.add_argument("--rank-rtol", type=float, default=1e-10)
    parser.add_argument("--membership-rtol", type=float, default=1e-8)
    parser.add_argument("--stability-margin", type=float, default=1e-9)
    parser.add_argument("--match-atol", type=float, default=1e-7)
    parser.add_argument("--format", choices=("json", "text"), default="json")


def _tol_from(args) -> ToleranceConfig:
    return ToleranceConfig(
        rank_rtol=args.rank_rtol,
        membership_rtol=args.membership_rtol,
        stability_margin=args.stability_margin,
        match_atol=args.match_atol,
    )


def _tol_dict(tol: ToleranceConfig) -> dict:
    return asdict(tol)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddlti",
        description="Data-driven relative degree / zero dynamics analysis of LTI systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("reldeg", help="relative degree of a SISO dataset")
    sp.add_argument("data")
    sp.add_argument("--lag", type=int, required=True)
    sp.add_argument("--method", choices=("informativity", "pe", "sharp"), default="informativity")
    sp.add_argument("--order", type=int, help="McMillan degree (pe method)")
    sp.add_argument("--window", type=int, help="analysis window L (pe and sharp methods)")
    _add_common(sp)

    sp = sub.add_parser("vecreldeg", help="vector relative degree of a MIMO dataset")
    sp.add_argument("data")
    sp.add_argument("--lag", type=int, required=True)
    _add_common(sp)

    sp = sub.add_parser("zerodyn", help="zero-dynamics stability decision")
    sp.add_argument("data")
    sp.add_argument("--lag", type=int, required=True)
    sp.add_argument("--order", type=int, required=True, help="McMillan degree n")
    sp.add_argument("--reldeg-sum", type=int, required=True)
    _add_common(sp)

    sp = sub.add_parser("check-pe", help="persistency of excitation of the input")
    sp.add_argument("data")
    sp.add_argument("--window", type=int, required=True, help="excitation order L")
    _add_common(sp)

    sp = sub.add_parser("reconstruct", help="continuous system from three sampled datasets")
    sp.add_argument("data", nargs=3, help="three dataset files with sampling_time set")
    sp.add_argument("--lag", type=str, required=True, help="lag per dataset, e.g. 2,2,2")
    sp.add_argument("--order", type=str, required=True, help="order per dataset, e.g. 4,4,4")
    sp.add_argument("--kmax", type=int, default=32)
    sp.add_argument("--output", help="write the reconstructed system JSON here")
    _add_common(sp)

    sp = sub.add_parser("simulate", help="generate a dataset from a system JSON")
    sp.add_argument("--system", required=True, help="system JSON file")
    sp.add_argument("--input", choices=("impulse", "prbs"), default="prbs")
    sp.add_argument("--length", type=int, required=True)
    sp.add_argument("--pe-order", type=int, help="verify the drawn input to this order")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--channel", type=int, default=1, help="impulse channel (1-based)")
    sp.add_argument("--sampling-time", type=float, help="ZOH step for continuous systems")
    sp.add_argument("--output", required=True)
    sp.add_argument("--data-format", choices=("csv", "json"), default="csv")
    _add_common(sp)

    sp = sub.add_parser("verify", help="run the Monte-Carlo oracle-equivalence suites")
    sp.add_argument("--trials", type=int, default=25)
    sp.add_argument("--seed", type=int, default=0)
    _add_common(sp)
    return parser


# --- commands ------------------------------------------------------------------------


def _cmd_reldeg(args) -> int:
    tol = _tol_from(args)
    ds = ingest(args.data)
    warnings, conditions = [], {}
    if args.method == "pe":
        if args.order is None:
            raise ParseError("--order is required for the pe method")
        L = args.window or (args.lag + args.order + 1)
        r = reldeg.reldeg_pe(ds, args.lag, args.order, L, tol)
        conditions["persistently_exciting_order"] = L + args.order
        verdict = {"method": "pe", "r": _jsonable(r)}
        exit_code = EXIT_OK
    elif args.method == "sharp":
        T = min(seq.length for seq in ds.sequences)
        L = args.window or T
        r = reldeg.reldeg_sharp(ds, args.lag, L, tol)
        verdict = {"method": "sharp", "r": _jsonable(r)}
        exit_code = EXIT_OK if r is not None else EXIT_INCONCLUSIVE
        if r is None:
            warnings.append("no output row leaves the initialization span; not decidable")
    else:
        res = reldeg.reldeg_informativity(ds, args.lag, tol)
        verdict = {
            "method": "informativity",
            "kind": res.kind.value,
            "r": res.r,
            "witness": res.witness,
        }
        exit_code = EXIT_OK if res.kind is RelDegKind.INFORMATIVE else EXIT_INCONCLUSIVE
    report = AnalysisReport("reldeg", verdict, _tol_dict(tol), conditions, warnings)
    _print_report(report, args.format)
    return exit_code


def _cmd_vecreldeg(args) -> int:
    tol = _tol_from(args)
    ds = ingest(args.data)
    res = reldeg.vecreldeg_informativity(ds, args.lag, tol)
    verdict = {
        "kind": res.kind.value,
        "r": list(res.r) if res.r is not None else None,
        "G": res.G.tolist() if res.G is not None else None,
        "identified_mask": res.identified_mask.tolist() if res.identified_mask is not None else None,
    }
    warnings = []
    if res.identified_mask is not None and not res.identified_mask.all():
        warnings.append("some decoupling entries are not identified (zeroed by convention)")
    report = AnalysisReport("vecreldeg", verdict, _tol_dict(tol), {}, warnings)
    _print_report(report, args.format)
    return EXIT_OK if res.kind is VecRelDegKind.FULL else EXIT_INCONCLUSIVE


def _cmd_zerodyn(args) -> int:
    tol = _tol_from(args)
    ds = ingest(args.data)
    res = zerodyn.algorithm2(ds, args.lag, args.order, args.reldeg_sum, tol)
    conditions = {
        "mcmillan_ok": res.conditions.mcmillan_ok,
        "reldeg_sum_ok": res.conditions.reldeg_sum_ok,
        "mpum_zd_stable": res.conditions.mpum_zd_stable.value,
    }
    warnings = []
    if res.conditions.mpum_zd_stable is Stability.BOUNDARY:
        warnings.append("spectral radius within the stability margin of 1")
    verdict = {
        "s": res.s,
        "zero_dynamics_dimension": 0 if res.q_tilde is None else res.q_tilde.shape[0],
        "spectrum": _jsonable(res.spectrum),
    }
    report = AnalysisReport("zerodyn", verdict, _tol_dict(tol), conditions, warnings)
    _print_report(report, args.format)
    return EXIT_OK if res.s != 0 else EXIT_INCONCLUSIVE


def _cmd_check_pe(args) -> int:
    tol = _tol_from(args)
    ds = ingest(args.data)
    pe = is_persistently_exciting(ds, args.window, tol)
    report = AnalysisReport(
        "check-pe", {"pe": bool(pe), "order": args.window}, _tol_dict(tol), {}, []
    )
    _print_report(report, args.format)
    return EXIT_OK if pe else EXIT_INCONCLUSIVE


def _parse_int_list(text: str, count: int, flag: str):
    parts = [int(v) for v in text.split(",")]
    if len(parts) == 1:
        parts = parts * count
    if len(parts) != count:
        raise ParseError(f"{flag} needs {count} comma-separated values, got {text!r}")
    return parts


def _cmd_reconstruct(args) -> int:
    tol = _tol_from(args)
    datasets = [ingest(path) for path in args.data]
    lags = _parse_int_list(args.lag, 3, "--lag")
    ns = _parse_int_list(args.order, 3, "--order")
    ct_sys = ct_mod.reconstruct_from_data(*datasets, lags=lags, ns=ns, k_max=args.kmax, tol=tol)
    system_json = lti.system_to_json(ct_sys)
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(system_json, fh)
            fh.write("\n")
    warnings = [
        "rational independence of the reciprocal sampling times is asserted, not verified"
    ]
    verdict = {"system": system_json, "sampling_times": [ds.sampling_time for ds in datasets]}
    conditions = {"kmax": args.kmax, "markov_validated": True}
    report = AnalysisReport("reconstruct", verdict, _tol_dict(tol), conditions, warnings)
    _print_report(report, args.format)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    tol = _tol_from(args)
    with open(args.system) as fh:
        sys_obj = lti.system_from_json(json.load(fh))
    sampling_time = None
    if isinstance(sys_obj, lti.ContinuousStateSpace):
        if args.sampling_time is None:
            raise ParseError("--sampling-time is required for a continuous system")
        sys_obj = lti.zoh_discretize(sys_obj, args.sampling_time)
        sampling_time = args.sampling_time
    T = args.length
    if args.input == "impulse":
        if not 1 <= args.channel <= sys_obj.m:
            raise ParseError(f"--channel must be in 1..{sys_obj.m}")
        u = np.zeros((T, sys_obj.m))
        u[0, args.channel - 1] = 1.0
    else:
        order = args.pe_order or max(T // (2 * sys_obj.m), 1)
        u = pe_input(T, sys_obj.m, order, args.seed)
    y, _ = lti.simulate(sys_obj, np.zeros(sys_obj.n), u)
    ds = DataSet(
        m=sys_obj.m, p=sys_obj.p, sequences=[Trajectory(u, y)], sampling_time=sampling_time
    )
    emit_dataset(ds, args.output, args.data_format)
    verdict = {"written": args.output, "samples": T, "input": args.input}
    if args.input == "prbs":
        verdict["pe_order_checked"] = args.pe_order or max(T // (2 * sys_obj.m), 1)
    report = AnalysisReport("simulate", verdict, _tol_dict(tol), {}, [])
    _print_report(report, args.format)
    return EXIT_OK


def _cmd_verify(args) -> int:
    from .verify import run_all_suites

    results = run_all_suites(trials=args.trials, seed=args.seed)
    all_ok = all(passed == total for _, passed, total in results)
    if args.format == "json":
        payload = {
            "suites": [
                {"name": name, "passed": passed, "total": total}
                for name, passed, total in results
            ],
            "ok": all_ok,
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for name, passed, total in results:
            print(f"{name}: {passed}/{total}")
        print("ok" if all_ok else "FAILED")
    return EXIT_OK if all_ok else EXIT_ERROR


_COMMANDS = {
    "reldeg": _cmd_reldeg,
    "vecreldeg": _cmd_vecreldeg,
    "zerodyn": _cmd_zerodyn,
    "check-pe": _cmd_check_pe,
    "reconstruct": _cmd_reconstruct,
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except DdltiError as exc:
        print(f"error: {type(exc).__name__.removesuffix('Error')}: {exc}", file=_sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
