import argparse
import datetime
import json
import os
import sys
import time
import traceback

from data import load_config, write_json
from errors import ConfigError, EulerTopError, NumericError
from experiments.system_component import ConfigReader
from logger import logger, set_level

# Import Experiments
from experiments import correspond
from experiments import ensemble_squeeze
from experiments import floquet_protocol
from experiments import phase_sweep
from experiments import simulate
from experiments import spectrum_fan
from experiments import stationary_points

APP_CONFIG_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)), "app_config.json")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

# Map experiment kinds to the modules that run them
experiment_registry = {
    "simulate": simulate,
    "stationary": stationary_points,
    "sweep": phase_sweep,
    "spectrum": spectrum_fan,
    "floquet": floquet_protocol,
    "ensemble": ensemble_squeeze,
    "correspond": correspond,
}


def app_config():
    with open(APP_CONFIG_PATH) as f:
        return json.load(f)


def figure_recipes():
    """Bundled recipes as (id, kind, module, description) rows."""
    rows = []
    for recipe in app_config()["recipes"]:
        module = experiment_registry[recipe["kind"]].__name__.split(".")[-1]
        rows.append((recipe["id"], recipe["kind"], module, recipe["description"]))
    return rows


def recipe_path(recipe_id):
    for recipe in app_config()["recipes"]:
        if recipe["id"] == recipe_id:
            return os.path.join(os.path.dirname(APP_CONFIG_PATH), recipe["config"])
    raise ConfigError(f"unknown recipe '{recipe_id}'; see the 'recipes' command")


def resolve_path(target):
    if target.startswith("recipe:"):
        return recipe_path(target[len("recipe:"):])
    return target


def _serializable(resolved):
    out = {}
    for key, value in resolved.items():
        if key == "reader":
            continue
        if hasattr(value, "to_json"):
            value = value.to_json()
        elif hasattr(value, "tolist"):
            value = value.tolist()
        out[key] = value
    return out


def run(target, out=None, threads=1):
    """Run one experiment config; returns the experiment's result dict."""
    path = resolve_path(target)
    config, text = load_config(path)
    reader = ConfigReader(config, text, path)

    kind = config.get("kind")
    if kind not in experiment_registry:
        raise reader.error(f"unknown experiment kind {kind!r}; expected one of {sorted(experiment_registry)}", "kind")
    module = experiment_registry[kind]
    resolved = reader.prepare(module.experiment()["fields"])

    prefix = out or config.get("out") or os.path.splitext(os.path.basename(path))[0]
    directory = os.path.dirname(prefix)
    if directory:
        os.makedirs(directory, exist_ok=True)

    logger.info("Running %s experiment from %s", kind, path, extra={"kind": kind})
    started = time.perf_counter()
    result = module.run(resolved, prefix, threads=threads)
    elapsed = time.perf_counter() - started

    meta = {
        "kind": kind,
        "config_path": path,
        "resolved": _serializable(resolved),
        "version": app_config()["version"],
        "wall_time_s": elapsed,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "outputs": result["outputs"],
    }
    result["outputs"].append(write_json(meta, f"{prefix}_meta.json"))
    logger.info("Finished %s in %.3f s", kind, elapsed, extra={"outputs": len(result["outputs"])})
    return result


def build_parser():
    parser = argparse.ArgumentParser(prog="eulertop", description=app_config()["project_description"])
    parser.add_argument("--log-level", default="info", help="debug, info, warning or error")
    commands = parser.add_subparsers(dest="command", required=True)

    run_parser = commands.add_parser("run", help="Run an experiment config or a bundled recipe")
    run_parser.add_argument("config", help="Path to a JSON config, or recipe:<id>")
    run_parser.add_argument("--out", help="Output path prefix")
    run_parser.add_argument("--threads", type=int, default=1, help="Worker threads for sweeps and scans")
    run_parser.add_argument("--log-level", default=argparse.SUPPRESS, help="debug, info, warning or error")

    recipes_parser = commands.add_parser("recipes", help="List bundled figure recipes")
    recipes_parser.add_argument("--log-level", default=argparse.SUPPRESS, help="debug, info, warning or error")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    set_level(args.log_level)

    if args.command == "recipes":
        for recipe_id, kind, module, description in figure_recipes():
            print(f"{recipe_id:8} {kind:11} {module:18} {description}")
        return EXIT_OK

    try:
        result = run(args.config, out=args.out, threads=max(1, args.threads))
    except ConfigError as e:
        logger.debug("Config error:\n%s", traceback.format_exc())
        print(e.anchored(), file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as e:
        logger.debug("Numeric failure:\n%s", traceback.format_exc())
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except EulerTopError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC

    for output in result["outputs"]:
        print(output)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
