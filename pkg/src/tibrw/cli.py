"""Command-line experiment runner.

Exit status: 0 on success, 2 for a bad configuration, 3 when a run finished but
failed a runtime diagnostic (pruning cap hit in most trials, failed recipe).
Every file written with ``--out`` gets a ``<out>.manifest.json`` alongside.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, brw, fit, ldp, recipes, theory, walks
from .env import ProfileError, VarianceProfile
from .rng import trial_stream

EXIT_CONFIG = 2
EXIT_RUNTIME = 3
DEFAULT_PROFILE = '[{"t": 1.0, "var": 1.0}]'


class ConfigFailure(Exception):
    pass


def _floats(text: str) -> list[float]:
    return [float(x) for x in str(text).split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in str(text).split(",") if x.strip()]


def _common(p: argparse.ArgumentParser, seed=True, trials=None):
    p.add_argument("--config", help="JSON file of option values; flags override it")
    p.add_argument("--profile", default=None,
                   help="profile JSON (inline or file), e.g. '[{\"t\":0.5,\"var\":1},...]'")
    p.add_argument("--out", help="output file (stdout if omitted)")
    p.add_argument("--threads", type=int, default=1)
    if seed:
        p.add_argument("--seed", type=int, default=None)
    if trials is not None:
        p.add_argument("--trials", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tibrw", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", help="closed-form asymptotics")
    _common(p, seed=False)
    p.add_argument("--model", default=None, choices=[m.value for m in theory.Model])

    p = sub.add_parser("ldp-solve", help="optimal macroscopic path")
    _common(p, seed=False)
    p.add_argument("--csv", help="also write (s, phi, I_s, s log 2) samples here")
    p.add_argument("--points", type=int, default=101)

    p = sub.add_parser("simulate", help="sample the maximum")
    _common(p, trials=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--mode", default=None, choices=[m.value for m in brw.Mode])
    p.add_argument("--window", type=float, default=None)
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--sub", default=None, choices=["exact", "pruned", "law"],
                   help="per-segment engine of greedy mode")
    p.add_argument("--grid-step", type=float, default=None)

    p = sub.add_parser("envelope-check", help="bridge envelope probability")
    _common(p, trials=True)
    p.add_argument("--n", default=None, help="comma-separated walk lengths")
    p.add_argument("--c-f", default=None, help="comma-separated envelope constants")

    p = sub.add_parser("barrier-check", help="bridge below log barrier probability")
    _common(p, trials=True)
    p.add_argument("--n", default=None, help="comma-separated walk lengths")
    p.add_argument("--y", default=None, help="comma-separated barrier offsets")
    p.add_argument("--coefficient", type=float, default=None)

    p = sub.add_parser("fit", help="fit a n - b log n + c to medians")
    _common(p, seed=False)
    p.add_argument("--input", default=None, help="CSV of n, median")
    p.add_argument("--sigma-eff", type=float, default=None)

    p = sub.add_parser("recipe", help="run a canned reproduction")
    _common(p)
    p.add_argument("name")
    return ap


_DEFAULTS = {
    "profile": DEFAULT_PROFILE, "seed": 0, "trials": None, "model": None, "n": None,
    "mode": "exact", "window": None, "cap": brw.DEFAULT_CAP, "sub": "exact",
    "grid_step": 0.02, "c_f": "6", "y": "1", "coefficient": 100.0, "sigma_eff": None,
}


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults < config file < flags."""
    opts = dict(_DEFAULTS)
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigFailure(f"cannot read config {args.config}: {exc}") from None
        for k, v in data.items():
            k = k.replace("-", "_")
            if k == "profile" and not isinstance(v, str):
                v = json.dumps(v)
            if isinstance(v, list) and k in ("n", "c_f", "y"):
                v = ",".join(str(x) for x in v)
            opts[k] = v
    for k, v in vars(args).items():
        if v is not None or k not in opts:
            opts[k] = v
    try:
        opts["profile_obj"] = VarianceProfile.from_json(opts["profile"])
    except ProfileError as exc:
        raise ConfigFailure(str(exc)) from None
    return opts


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _manifest(out: str | None, command: str, opts: dict, started: float):
    if not out:
        return
    echo = {k: v for k, v in opts.items() if k != "profile_obj"}
    echo["profile"] = opts["profile_obj"].to_json()
    man = {"command": command, "config": echo, "version": __version__,
           "seed": opts.get("seed"), "wall_time_s": time.time() - started}
    Path(f"{out}.manifest.json").write_text(json.dumps(man, indent=2, default=str) + "\n")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_predict(opts) -> int:
    if not opts["model"]:
        raise ConfigFailure("--model is required")
    try:
        p = theory.predict(opts["profile_obj"], opts["model"])
    except theory.RegimeMismatch as exc:
        raise ConfigFailure(str(exc)) from None
    d = p.to_dict()
    _emit(json.dumps({k: d[k] for k in ("velocity", "log_coeff", "sigma_eff", "beta", "model")},
                     indent=2) + "\n", opts["out"])
    return 0


def cmd_ldp(opts) -> int:
    prof = opts["profile_obj"]
    path, speed = ldp.optimal_curve(prof)
    _emit(json.dumps({"speed": speed, "breakpoints": path.breakpoints()}, indent=2) + "\n",
          opts["out"])
    if opts.get("csv"):
        rows = ldp.sample_curve(prof, path, int(opts["points"]))
        Path(opts["csv"]).write_text(_csv(["s", "phi", "I_s", "s_log2"], rows.tolist()))
    return 0


def cmd_simulate(opts) -> int:
    if opts["n"] is None:
        raise ConfigFailure("--n is required")
    trials = int(opts["trials"] or 1)
    try:
        cfg = brw.TrialConfig(
            opts["profile_obj"], int(opts["n"]), mode=opts["mode"], seed=int(opts["seed"]),
            trials=trials, window=opts["window"], cap=int(opts["cap"]), sub=opts["sub"],
            grid_step=float(opts["grid_step"]))
    except (brw.ConfigError, ValueError) as exc:
        raise ConfigFailure(str(exc)) from None
    s = brw.simulate(cfg, threads=int(opts["threads"]))
    rows = [(i, repr(float(v)), int(c)) for i, (v, c) in enumerate(zip(s.values, s.capped))]
    _emit(_csv(["trial", "value", "capped_flag"], rows), opts["out"])
    q1, q3 = np.quantile(s.values, [0.25, 0.75])
    summary = {"median": fit.sample_median(s.values), "mean": float(np.mean(s.values)),
               "iqr": float(q3 - q1), "trials": trials, "seed": cfg.seed,
               "cap_hits": s.cap_hits}
    text = json.dumps(summary, indent=2) + "\n"
    if opts["out"]:
        Path(f"{opts['out']}.summary.json").write_text(text)
    else:
        sys.stderr.write(text)
    if cfg.mode in (brw.Mode.PRUNED, brw.Mode.GREEDY) and s.cap_hits > trials / 2:
        sys.stderr.write(f"diagnostic: pruning cap hit in {s.cap_hits}/{trials} trials\n")
        return EXIT_RUNTIME
    return 0


def cmd_envelope(opts) -> int:
    trials = int(opts["trials"] or 10_000)
    rows, i = [], 0
    for n in _ints(opts["n"] or "16,64,256"):
        for c_f in _floats(opts["c_f"]):
            try:
                spec = walks.BridgeSpec(n, opts["profile_obj"], c_f)
                p, se = walks.envelope_probability(spec, trials, trial_stream(int(opts["seed"]), i))
            except (ValueError, ProfileError) as exc:
                raise ConfigFailure(str(exc)) from None
            rows.append((n, c_f, repr(p), repr(se), trials, opts["seed"]))
            i += 1
    _emit(_csv(["n", "c_f", "estimate", "std_error", "trials", "seed"], rows), opts["out"])
    return 0


def cmd_barrier(opts) -> int:
    trials = int(opts["trials"] or 100_000)
    rows, i = [], 0
    for n in _ints(opts["n"] or "64,256,1024"):
        for y in _floats(opts["y"]):
            try:
                spec = walks.BarrierSpec(n, y, float(opts["coefficient"]))
                p, se = walks.bb_barrier_probability(spec, trials, trial_stream(int(opts["seed"]), i))
            except ValueError as exc:
                raise ConfigFailure(str(exc)) from None
            rows.append((n, y, repr(p), repr(se), trials, opts["seed"]))
            i += 1
    _emit(_csv(["n", "y", "estimate", "std_error", "trials", "seed"], rows), opts["out"])
    return 0


def _read_points(path: str) -> list[tuple[float, float]]:
    pts = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                pts.append((float(row[0]), float(row[1])))
            except ValueError:
                if pts:
                    raise
    return pts


def cmd_fit(opts) -> int:
    if not opts.get("input"):
        raise ConfigFailure("--input is required")
    try:
        r = fit.fit_correction(_read_points(opts["input"]), opts["sigma_eff"])
    except (OSError, ValueError, IndexError) as exc:
        raise ConfigFailure(str(exc)) from None
    _emit(json.dumps(r.to_dict(), indent=2) + "\n", opts["out"])
    return 0


def cmd_recipe(opts) -> int:
    name = opts["name"]
    if name not in recipes.RECIPES:
        raise ConfigFailure(f"unknown recipe {name!r}; choose from {sorted(recipes.RECIPES)}")
    res = recipes.RECIPES[name]()
    _emit(res.report() + "\n", opts["out"])
    return 0 if res.passed else EXIT_RUNTIME


COMMANDS = {
    "predict": cmd_predict, "ldp-solve": cmd_ldp, "simulate": cmd_simulate,
    "envelope-check": cmd_envelope, "barrier-check": cmd_barrier, "fit": cmd_fit,
    "recipe": cmd_recipe,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    started = time.time()
    try:
        opts = resolve(args)
        code = COMMANDS[args.command](opts)
    except ConfigFailure as exc:
        sys.stderr.write(f"tibrw {args.command}: {exc}\n")
        return EXIT_CONFIG
    _manifest(opts.get("out"), args.command, opts, started)
    return code


if __name__ == "__main__":
    sys.exit(main())
