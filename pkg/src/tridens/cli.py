"""``rmt`` command line: run one experiment from a JSON config and write its records.

Exit codes: 0 success, 2 parameter error, 3 numerical error, 4 I/O error.
"""
import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

from .errors import NumericalError, ParameterError
from .experiments import EXPERIMENTS, ExperimentConfig, default_config, run_experiment
from .report import plot_result, write_result

log = logging.getLogger("tridens")

EXIT_OK, EXIT_PARAM, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rmt", description="Tridiagonal beta-ensemble experiments.")
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", type=Path, help="JSON file with ExperimentConfig fields")
    parser.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    parser.add_argument("--out", help="output file (default: <experiment>.<format>)")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--replicas", type=int)
    parser.add_argument("--n-grid", type=_int_list, help="comma-separated dimensions, e.g. 64,128,256")
    parser.add_argument("--workers", type=int, help="worker processes for replicas")
    parser.add_argument("--plot", action="store_true", help="also render a PNG next to the output file")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def load_config(args) -> ExperimentConfig:
    if args.config is not None:
        data = json.loads(args.config.read_text())
        if not isinstance(data, dict):
            raise ParameterError("config file must hold a JSON object")
        if data.get("experiment", args.experiment) != args.experiment:
            raise ParameterError(f"config is for experiment {data['experiment']!r}, not {args.experiment!r}")
        data["experiment"] = args.experiment
        cfg = ExperimentConfig.from_dict(data)
    else:
        cfg = default_config(args.experiment)
    overrides = {
        "master_seed": args.seed,
        "output_path": args.out,
        "output_format": args.format,
        "replicas": args.replicas,
        "n_grid": args.n_grid,
        "workers": args.workers,
    }
    for name, value in overrides.items():
        if value is not None:
            setattr(cfg, name, value)
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    logging.captureWarnings(True)
    try:
        cfg = load_config(args)
        out = Path(cfg.output_path or f"{cfg.experiment}.{cfg.output_format}")
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            result = run_experiment(cfg)
        write_result(result, out, cfg.output_format)
        log.info("wrote %d records to %s", len(result.rows()), out)
        if args.plot:
            fig = plot_result(result, out.with_suffix(".png"))
            log.info("wrote figure %s", fig)
    except ParameterError as exc:
        print(f"rmt: parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except NumericalError as exc:
        print(f"rmt: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, json.JSONDecodeError) as exc:
        print(f"rmt: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except TypeError as exc:
        # wrongly typed config values surface here
        print(f"rmt: parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
