"""Command-line runner.

    rqi --config harvest.ini --out results/
    rqi validate

Exit codes: 0 success, 2 invalid input or failed validation, 3 numerical failure.
"""

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .config import SCHEMA, ConfigError, ExperimentConfig, TOLERANCE_KEYS, load_config
from .errors import NumericalFailure, RQIError

__all__ = ["main"]

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3
THREADS_ENV = "RQI_THREADS"


def _fmt(v):
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            raise NumericalFailure("NaN in output")
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.17g}"
    return str(v)


def _threads(flag):
    if flag is not None:
        n = flag
    else:
        raw = os.environ.get(THREADS_ENV)
        try:
            n = int(raw) if raw else 1
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("thread count must be at least 1")
    return n


def _write(out_dir, tag, header, rows, sidecar):
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{tag}.csv")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(x) for x in r])
    with open(os.path.join(out_dir, f"{tag}.json"), "w", encoding="utf-8", newline="") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    return path


def _sidecar(cfg, columns, threads, extra=None):
    d = {"config": cfg.as_dict(), "version": __version__, "tolerances": cfg.tolerances,
         "columns": list(columns), "threads": threads}
    if extra:
        d.update(extra)
    return d


def _run_validate(cfg, out_dir, threads):
    from .acceptance import run_all

    spec = str(cfg.params.get("criteria", "all")).strip().lower()
    only = None
    if spec != "all":
        try:
            only = {int(x) for x in spec.replace(",", " ").split()}
        except ValueError:
            raise ConfigError("criteria must be 'all' or a list of numbers") from None
    results = run_all(scale=cfg.tolerances["scale"], only=only)
    print(f"{'criterion':>9}  {'result':6}  {'seconds':>8}  title")
    for r in results:
        print(f"{r.number:>9}  {'PASS' if r.passed else 'FAIL':6}  {r.seconds:8.1f}  {r.title}")
    rows = [(r.number, int(r.passed), r.seconds) for r in results]
    header = ("criterion", "passed", "seconds")
    detail = {str(r.number): {"title": r.title, "passed": r.passed, "detail": r.detail} for r in results}
    _write(out_dir, "validate", header, rows, _sidecar(cfg, header, threads, {"results": detail}))
    return EXIT_OK if all(r.passed for r in results) else EXIT_INVALID


def run(cfg, out_dir, threads=1):
    from .experiments import COLUMNS, run_point

    if cfg.experiment == "validate":
        return _run_validate(cfg, out_dir, threads)
    cols = COLUMNS[cfg.experiment]
    if cfg.sweep is None:
        points = [dict(cfg.params)]
        header = cols
    else:
        conv = SCHEMA[cfg.experiment][cfg.sweep.param][0]
        points = []
        for v in cfg.sweep.values():
            p = dict(cfg.params)
            p[cfg.sweep.param] = int(round(v)) if conv is int else float(v)
            points.append(p)
        header = (cfg.sweep.param,) + cols

    def one(p):
        return run_point(cfg.experiment, p, cfg.tolerances)

    if threads > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            outs = list(ex.map(one, points))     # map keeps sweep order
    else:
        outs = [one(p) for p in points]
    rows = []
    for p, o in zip(points, outs):
        rows.append(((p[cfg.sweep.param],) if cfg.sweep else ()) + tuple(o))
    path = _write(out_dir, cfg.experiment, header, rows, _sidecar(cfg, header, threads))
    print(f"wrote {path} ({len(rows)} rows)")
    return EXIT_OK


def _parser():
    ap = argparse.ArgumentParser(prog="rqi", description=__doc__.split("\n")[0])
    ap.add_argument("experiment", nargs="?", choices=sorted(SCHEMA),
                    help="run an experiment with default parameters (ignored with --config)")
    ap.add_argument("--config", help="INI experiment file")
    ap.add_argument("--out", help="output directory (default: [run] out, else current directory)")
    ap.add_argument("--threads", type=int, default=None,
                    help=f"worker threads for sweeps (default: ${THREADS_ENV} or 1)")
    ap.add_argument("--tolerance-scale", type=float, default=None,
                    help="multiply acceptance tolerances by this factor")
    ap.add_argument("--version", action="version", version=f"rqi {__version__}")
    return ap


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.config:
            cfg = load_config(args.config)
        elif args.experiment:
            cfg = ExperimentConfig(args.experiment, {k: v[1] for k, v in SCHEMA[args.experiment].items()},
                                   None, {k: v[1] for k, v in TOLERANCE_KEYS.items()})
        else:
            raise ConfigError("give --config or an experiment name")
        if args.tolerance_scale is not None:
            if not args.tolerance_scale > 0:
                raise ConfigError("--tolerance-scale must be positive")
            cfg.tolerances["scale"] = args.tolerance_scale
        out_dir = args.out or cfg.out or "."
        return run(cfg, out_dir, _threads(args.threads))
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (RQIError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
