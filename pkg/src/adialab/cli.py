"""Command-line front end.

Subcommands map one-to-one onto the analysis operations: ``spectrum``,
``schedule``, ``evolve``, ``theorem1``, ``theorem2``, ``sweep`` and
``validate``.  Reports are emitted as CSV (17 significant digits, trailing
``#``-prefixed summary lines) or as JSON with the stable top-level layout
{command, config, results, summary}.  Identical argv and seed produce
byte-identical output.

Exit codes: 0 success, 1 domain errors, 2 numeric/resource errors (also a
failing ``validate``), 64 usage problems.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Any, Sequence

import numpy as np

from . import dynamics, schedule, spectra, theorems
from .core import make_overlap
from .errors import DomainError, NumericError, ResourceLimitError
from .paths import Driving, General, Linear, PiecewiseLinear, PolynomialX, Shifted
from .schedule import RuntimeEstimate

USAGE_EXIT = 64

_CONFIG_KEYS = {
    "overlap_re",
    "overlap_im",
    "model",
    "x",
    "fg",
    "epsilon",
    "n_points",
    "seed",
    "output_format",
    "output_path",
}

_DEFAULTS = {
    "overlap_re": 0.0,
    "overlap_im": 0.0,
    "model": "linear",
    "x": None,
    "fg": (),
    "epsilon": 0.1,
    "n_points": 1001,
    "seed": 42,
    "output_format": "csv",
    "output_path": None,
}

_VALIDATE_TOL = 1e-12


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: A003 - argparse API
        raise _UsageError(message)


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    if value is None:
        return "none"
    return str(value)


def _emit(text: str, output_path: str | None) -> None:
    if output_path is None:
        sys.stdout.write(text)
    else:
        with open(output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _csv_report(header: Sequence[str], rows: Sequence[Sequence[Any]], summary: dict[str, Any]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(cell) for cell in row) for row in rows)
    if summary:
        lines.append("# " + ",".join(f"{k}={_fmt(v)}" for k, v in summary.items()))
    return "\n".join(lines) + "\n"


def _json_report(command: str, config: dict[str, Any], results: Any, summary: dict[str, Any]) -> str:
    doc = {"command": command, "config": config, "results": results, "summary": summary}
    return json.dumps(doc, indent=2) + "\n"


def _load_config(path: str | None) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise DomainError(f"cannot read config file: {exc}")
    except json.JSONDecodeError as exc:
        raise DomainError(f"config file is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise DomainError("config file must hold a JSON object")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise DomainError(f"unknown config keys: {sorted(unknown)}")
    return raw


def _resolve(args: argparse.Namespace, cfg: dict[str, Any]) -> dict[str, Any]:
    """Effective run configuration: flags override file values override defaults."""
    out: dict[str, Any] = {}
    a_flag = getattr(args, "a", None)
    if a_flag is not None:
        re, im = _parse_overlap(a_flag)
        out["overlap_re"], out["overlap_im"] = re, im
    else:
        out["overlap_re"] = float(cfg.get("overlap_re", _DEFAULTS["overlap_re"]))
        out["overlap_im"] = float(cfg.get("overlap_im", _DEFAULTS["overlap_im"]))

    command_defaults = {
        "n_points": getattr(args, "default_n", _DEFAULTS["n_points"]),
        "output_format": getattr(args, "default_format", _DEFAULTS["output_format"]),
    }
    for key, attr in (
        ("model", "model"),
        ("x", "x"),
        ("epsilon", "epsilon"),
        ("n_points", "n"),
        ("seed", "seed"),
        ("output_format", "format"),
        ("output_path", "output"),
    ):
        flag = getattr(args, attr, None)
        if flag is not None:
            out[key] = flag
        else:
            out[key] = cfg.get(key, command_defaults.get(key, _DEFAULTS[key]))

    fg_flag = getattr(args, "fg", None)
    if fg_flag:
        out["fg"] = tuple(_parse_fg(item) for item in fg_flag)
    else:
        out["fg"] = tuple(tuple(float(v) for v in pt) for pt in cfg.get("fg", ()))

    out["epsilon"] = float(out["epsilon"])
    out["seed"] = int(out["seed"])
    if out["seed"] < 0 or out["seed"] > 2**64 - 1:
        raise DomainError("seed must fit in 64 unsigned bits")
    if out["output_format"] not in ("csv", "json"):
        raise DomainError(f"unknown output format {out['output_format']!r}")
    return out


def _parse_overlap(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise DomainError("--a expects 're,im' (two decimals separated by a comma)")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise DomainError(f"cannot parse overlap components from {text!r}")


def _parse_fg(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise DomainError("--fg expects 's:f:g'")
    try:
        s, f, g = (float(p) for p in parts)
    except ValueError:
        raise DomainError(f"cannot parse control point from {text!r}")
    if not 0.0 < s < 1.0:
        raise DomainError("--fg control points must have 0 < s < 1; endpoints are pinned")
    return s, f, g


def _resolve_x(x_value: Any, magnitude: float) -> float:
    if x_value is None:
        return 0.0
    if isinstance(x_value, str) and x_value.strip() == "1/a":
        if magnitude == 0.0:
            raise DomainError("x = 1/a is undefined at zero overlap magnitude")
        return 1.0 / magnitude
    try:
        return float(x_value)
    except (TypeError, ValueError):
        raise DomainError(f"cannot parse x value {x_value!r} (want a float or '1/a')")


def _build_spec(config: dict[str, Any], magnitude: float):
    if config["fg"]:
        interior = sorted(config["fg"])
        points = ((0.0, 1.0, 0.0), *interior, (1.0, 0.0, 1.0))
        return PiecewiseLinear(points)
    return PolynomialX(_resolve_x(config["x"], magnitude))


def _build_model(config: dict[str, Any], magnitude: float):
    name = config["model"]
    if name == "linear":
        return Linear()
    if name == "driving":
        return Driving()
    if name == "general":
        return General(_build_spec(config, magnitude))
    if name == "shifted":
        return Shifted(_build_spec(config, magnitude))
    raise DomainError(f"unknown model {name!r} (want linear|driving|general|shifted)")


def _workers() -> int:
    raw = os.environ.get("ADIALAB_THREADS")
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise DomainError(f"ADIALAB_THREADS must be a positive integer, got {raw!r}")
    if value < 1:
        raise DomainError(f"ADIALAB_THREADS must be a positive integer, got {raw!r}")
    return value


def _estimate_json(est: RuntimeEstimate) -> dict[str, Any]:
    return {
        "finite": est.finite,
        "t": est.t,
        "witness_s": est.witness_s,
        "witness_gap": est.witness_gap,
    }


def _estimate_cell(est: RuntimeEstimate) -> Any:
    return est.t if est.finite else "unbounded"


def _json_config(config: dict[str, Any], **extras: Any) -> dict[str, Any]:
    doc = {
        "overlap_re": config["overlap_re"],
        "overlap_im": config["overlap_im"],
        "model": config["model"],
        "x": config["x"],
        "fg": [list(pt) for pt in config["fg"]],
        "epsilon": config["epsilon"],
        "n_points": config["n_points"],
        "seed": config["seed"],
        "output_format": config["output_format"],
        "output_path": config["output_path"],
    }
    doc.update(extras)
    return doc


# --- subcommand handlers ---------------------------------------------------


def _cmd_spectrum(args: argparse.Namespace) -> int:
    config = _resolve(args, _load_config(args.config))
    n = int(config["n_points"])
    o = make_overlap(config["overlap_re"], config["overlap_im"])
    model = _build_model(config, abs(o.a))
    profile = spectra.scan(model, o, n)

    summary = {
        "delta_min": profile.delta_min,
        "s_star": profile.s_star,
        "delta_max": profile.delta_max,
        "peak_ground_energy": profile.peak_ground_energy,
        "degenerate": profile.degenerate,
    }
    if config["output_format"] == "json":
        results = [
            {"s": p.s, "e0": p.e0, "e1": p.e1, "gap": p.gap, "ground_energy": p.ground_energy, "rate": p.rate}
            for p in profile.points
        ]
        text = _json_report("spectrum", _json_config(config), results, summary)
    else:
        rows = [(p.s, p.e0, p.e1, p.gap, p.ground_energy, p.rate) for p in profile.points]
        text = _csv_report(("s", "e0", "e1", "gap", "ground_energy", "rate"), rows, summary)
    _emit(text, config["output_path"])
    return 0


def _cmd_schedule(args: argparse.Namespace) -> int:
    config = _resolve(args, _load_config(args.config))
    n = int(config["n_points"])
    o = make_overlap(config["overlap_re"], config["overlap_im"])
    model = _build_model(config, abs(o.a))
    profile = spectra.scan(model, o, n)
    bounds = [
        schedule.runtime_global(profile, config["epsilon"]),
        schedule.runtime_local_from_profile(profile, config["epsilon"]),
    ]

    summary = {
        "delta_min": profile.delta_min,
        "delta_max": profile.delta_max,
        "epsilon": config["epsilon"],
        "degenerate": profile.degenerate,
    }
    if config["output_format"] == "json":
        results = [dict(method=b.method, **_estimate_json(b)) for b in bounds]
        text = _json_report("schedule", _json_config(config), results, summary)
    else:
        rows = [(b.method, b.finite, _estimate_cell(b), b.witness_s, b.witness_gap) for b in bounds]
        text = _csv_report(("method", "finite", "t", "witness_s", "witness_gap"), rows, summary)
    _emit(text, config["output_path"])
    return 0


def _cmd_evolve(args: argparse.Namespace) -> int:
    config = _resolve(args, _load_config(args.config))
    o = make_overlap(config["overlap_re"], config["overlap_im"])
    model = _build_model(config, abs(o.a))
    total_time = float(args.time)
    step_tol = float(args.tol)
    result = dynamics.evolve(model, o, total_time, step_tol=step_tol, sample_trajectory=args.trajectory)

    summary = {
        "fidelity": result.fidelity,
        "total_time": result.total_time,
        "norm_drift": result.norm_drift,
    }
    state = result.final_state
    if config["output_format"] == "json":
        results: dict[str, Any] = {
            "final_state": {
                "c1_re": state.c1.real,
                "c1_im": state.c1.imag,
                "c2_re": state.c2.real,
                "c2_im": state.c2.imag,
            }
        }
        if result.trajectory is not None:
            results["trajectory"] = [
                {"t": t, "c1_re": v.c1.real, "c1_im": v.c1.imag, "c2_re": v.c2.real, "c2_im": v.c2.imag}
                for t, v in result.trajectory
            ]
        text = _json_report("evolve", _json_config(config, time=total_time, step_tol=step_tol), results, summary)
    else:
        if result.trajectory is not None:
            header = ("t", "c1_re", "c1_im", "c2_re", "c2_im")
            rows = [(t, v.c1.real, v.c1.imag, v.c2.real, v.c2.imag) for t, v in result.trajectory]
        else:
            header = ("c1_re", "c1_im", "c2_re", "c2_im")
            rows = [(state.c1.real, state.c1.imag, state.c2.real, state.c2.imag)]
        text = _csv_report(header, rows, summary)
    _emit(text, config["output_path"])
    return 0


def _cmd_theorem1(args: argparse.Namespace) -> int:
    config = _resolve(args, _load_config(args.config))
    n = int(config["n_points"])
    trials = theorems.run_crossing_campaign(args.trials, config["seed"], n_points=n, workers=_workers())
    confirmed = theorems.campaign_verdict(trials)

    summary = {
        "verdict": "THEOREM1_CONFIRMED" if confirmed else "THEOREM1_COUNTEREXAMPLE",
        "trials": args.trials,
        "max_gap_at_root": max(t.crossing.gap_at_root for t in trials),
        "all_unbounded": all(t.unbounded for t in trials),
    }
    if config["output_format"] == "json":
        results = [
            {
                "trial": t.index,
                "s_root": t.crossing.s_root,
                "f_minus_g_at_root": t.crossing.f_minus_g_at_root,
                "gap_at_root": t.crossing.gap_at_root,
                "bisection_iterations": t.crossing.bisection_iterations,
                "unbounded": t.unbounded,
            }
            for t in trials
        ]
        text = _json_report("theorem1", _json_config(config, trials=args.trials), results, summary)
    else:
        rows = [
            (
                t.index,
                t.crossing.s_root,
                t.crossing.f_minus_g_at_root,
                t.crossing.gap_at_root,
                t.crossing.bisection_iterations,
                t.unbounded,
            )
            for t in trials
        ]
        header = ("trial", "s_root", "f_minus_g_at_root", "gap_at_root", "bisection_iterations", "unbounded")
        text = _csv_report(header, rows, summary)
    _emit(text, config["output_path"])
    return 0


def _cmd_theorem2(args: argparse.Namespace) -> int:
    config = _resolve(args, _load_config(args.config))
    n = int(config["n_points"])
    reports = theorems.run_variant_campaign(args.trials, config["seed"], n_points=n, workers=_workers())
    confirmed = theorems.campaign_verdict(reports)

    summary = {
        "verdict": "THEOREM2_CONFIRMED" if confirmed else "THEOREM2_COUNTEREXAMPLE",
        "trials": args.trials,
        "max_ground_energy": max(r.max_ground_energy for r in reports),
        "max_delta_min": max(r.delta_min for r in reports),
        "all_unbounded": all(r.unbounded for r in reports),
    }
    if config["output_format"] == "json":
        results = [
            {
                "trial": i,
                "h_at_0": r.h_at_0,
                "h_at_1": r.h_at_1,
                "max_ground_energy": r.max_ground_energy,
                "delta_min": r.delta_min,
                "s_root": r.crossing.s_root,
                "gap_at_root": r.crossing.gap_at_root,
                "unbounded": r.unbounded,
            }
            for i, r in enumerate(reports)
        ]
        text = _json_report("theorem2", _json_config(config, trials=args.trials), results, summary)
    else:
        rows = [
            (i, r.h_at_0, r.h_at_1, r.max_ground_energy, r.delta_min, r.crossing.s_root, r.unbounded)
            for i, r in enumerate(reports)
        ]
        header = ("trial", "h_at_0", "h_at_1", "max_ground_energy", "delta_min", "s_root", "unbounded")
        text = _csv_report(header, rows, summary)
    _emit(text, config["output_path"])
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = _resolve(args, _load_config(args.config))
    n = int(config["n_points"])
    try:
        magnitudes = [float(p) for p in args.a_list.split(",") if p]
    except ValueError:
        raise DomainError(f"cannot parse --a-list {args.a_list!r}")
    if not magnitudes:
        raise DomainError("--a-list must name at least one magnitude")

    if isinstance(config["x"], str) and config["x"].strip() == "1/a":
        model: Any = lambda mag: _build_model(config, mag)
    else:
        model = _build_model(config, magnitudes[0])
    result = schedule.sweep_scaling(model, magnitudes, config["epsilon"], n_points=n)

    summary = {
        "slope_global": result.slope_global,
        "slope_local": result.slope_local,
        "slope_peak_energy": result.slope_peak_energy,
        "epsilon": config["epsilon"],
    }
    if config["output_format"] == "json":
        results = [
            {
                "overlap_magnitude": r.overlap_magnitude,
                "t_global": _estimate_json(r.t_global),
                "t_local": _estimate_json(r.t_local),
                "delta_min": r.delta_min,
                "peak_ground_energy": r.peak_ground_energy,
                "driving_budget": r.driving_budget,
            }
            for r in result.rows
        ]
        text = _json_report("sweep", _json_config(config, a_list=magnitudes), results, summary)
    else:
        rows = [
            (
                r.overlap_magnitude,
                _estimate_cell(r.t_global),
                _estimate_cell(r.t_local),
                r.delta_min,
                r.peak_ground_energy,
                r.driving_budget,
            )
            for r in result.rows
        ]
        header = (
            "overlap_magnitude",
            "t_global",
            "t_local",
            "delta_min",
            "peak_ground_energy",
            "driving_budget",
        )
        text = _csv_report(header, rows, summary)
    _emit(text, config["output_path"])
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    config = _resolve(args, _load_config(args.config))
    n = int(config["n_points"]) if args.n is not None else 501
    trials = args.trials
    rows = []
    worst = 0.0
    for i in range(trials):
        rng = np.random.default_rng([config["seed"], i])
        mag = math.sqrt(rng.uniform(0.0, 0.999))
        angle = rng.uniform(0.0, 2.0 * math.pi)
        re, im = mag * math.cos(angle), mag * math.sin(angle)
        o = make_overlap(re, im)
        x = rng.uniform(-1.5, 8.0)
        for name, model in (
            ("linear", Linear()),
            ("driving", Driving()),
            ("general", General(PolynomialX(x))),
            ("shifted", Shifted(PolynomialX(x))),
        ):
            err = spectra.validate_closed_forms(model, o, n)
            worst = max(worst, err)
            rows.append((name, re, im, x, err))

    passed = worst <= _VALIDATE_TOL
    summary = {
        "max_abs_error": worst,
        "tolerance": _VALIDATE_TOL,
        "passed": passed,
        "overlaps": trials,
        "n_points": n,
    }
    if config["output_format"] == "json":
        results = [
            {"model": name, "overlap_re": re, "overlap_im": im, "x": x, "max_abs_error": err}
            for name, re, im, x, err in rows
        ]
        text = _json_report("validate", _json_config(config, trials=trials), results, summary)
    else:
        text = _csv_report(("model", "overlap_re", "overlap_im", "x", "max_abs_error"), rows, summary)
    _emit(text, config["output_path"])
    return 0 if passed else 2


# --- parser ----------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser, *, with_overlap: bool = True) -> None:
    if with_overlap:
        parser.add_argument("--a", help="overlap as 're,im'")
        parser.add_argument("--model", choices=("linear", "driving", "general", "shifted"))
        parser.add_argument("--x", help="curvature parameter (float, or '1/a')")
        parser.add_argument("--fg", action="append", help="control point 's:f:g' (repeatable)")
        parser.add_argument("--epsilon", type=float, help="adiabatic accuracy parameter in (0,1)")
    parser.add_argument("--n", type=int, help="grid points over [0,1]")
    parser.add_argument("--seed", type=int, help="64-bit unsigned campaign seed")
    parser.add_argument("--format", choices=("csv", "json"), help="output format")
    parser.add_argument("--output", help="output file path (default: stdout)")
    parser.add_argument("--config", help="JSON config file mirroring the run configuration")


def build_parser() -> _Parser:
    parser = _Parser(prog="adialab", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("spectrum", help="grid scan of levels, gap and evolving rate")
    _add_common(p)
    p.set_defaults(handler=_cmd_spectrum)

    p = sub.add_parser("schedule", help="global and local runtime bounds")
    _add_common(p)
    p.set_defaults(handler=_cmd_schedule)

    p = sub.add_parser("evolve", help="integrate the dynamics and report fidelity")
    _add_common(p)
    p.add_argument("--time", type=float, required=True, help="total evolution time")
    p.add_argument("--tol", type=float, default=dynamics.DEFAULT_STEP_TOL, help="local error per unit time")
    p.add_argument("--trajectory", action="store_true", help="emit sampled trajectory rows")
    p.set_defaults(handler=_cmd_evolve)

    p = sub.add_parser("theorem1", help="fuzz the gap-crossing failure at zero overlap")
    _add_common(p, with_overlap=False)
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(handler=_cmd_theorem1, default_format="json", default_n=theorems.CAMPAIGN_N_POINTS)

    p = sub.add_parser("theorem2", help="fuzz the zero-energy shifted model at zero overlap")
    _add_common(p, with_overlap=False)
    p.add_argument("--trials", type=int, default=200)
    p.set_defaults(handler=_cmd_theorem2, default_format="json", default_n=theorems.CAMPAIGN_N_POINTS)

    p = sub.add_parser("sweep", help="runtime scaling across overlap magnitudes")
    _add_common(p)
    p.add_argument("--a-list", required=True, help="comma-separated overlap magnitudes")
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("validate", help="closed forms vs eigensolver oracle (self-test)")
    _add_common(p, with_overlap=False)
    p.add_argument("--trials", type=int, default=50, help="number of random overlaps")
    p.set_defaults(handler=_cmd_validate, default_n=501)

    return parser


def run_command(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return USAGE_EXIT
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if getattr(args, "handler", None) is None:
        sys.stderr.write("usage error: expected a subcommand "
                         "(spectrum|schedule|evolve|theorem1|theorem2|sweep|validate)\n")
        return USAGE_EXIT

    try:
        return args.handler(args)
    except DomainError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except (NumericError, ResourceLimitError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
