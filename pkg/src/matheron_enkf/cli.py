"""Command-line client over the HTTP service.

Subcommands run against an in-process application instance by default, or
against a remote server via --server. All numeric payloads round-trip
through JSON, whose float serialization is the shortest exact decimal, so
CSV outputs are byte-identical for a given seed either way.

Exit codes: 0 success, 1 check failed, 2 bad arguments or config,
3 numerical failure (or unreachable server).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import httpx

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_ARGS = 2
EXIT_NUMERICAL = 3

SEED_ENV_VAR = "MATHERON_ENKF_SEED"

POSTERIOR_HEADER = ("method,grid_index,position,truth,is_observed,obs_value,"
                    "post_mean,post_std,draw_id,draw_value")
TIMING_HEADER = "method,axis,axis_value,fit_time_s,predict_time_s,rmse,runs,seed"

DEFAULT_METHODS = "gp,enkf,letkf"
DEFAULT_OBS_VALUES = "40,80,160,320"
DEFAULT_DIM_VALUES = "200,400,600,800"

# Config file keys, typed. The file is flat key=value lines; '#' starts a
# comment. Keys mirror the experiment settings.
CONFIG_KEYS = {
    "d": int,
    "m": int,
    "sigma": float,
    "ell": float,
    "tau": float,
    "n_ens": int,
    "seed": int,
    "runs": int,
    "methods": str,
    "perturb_obs": bool,
    "loc_radius": float,
    "obs_sites": str,
    "n_draws": int,
    "values": str,
}

_TRUE_WORDS = {"true", "1", "yes", "on"}
_FALSE_WORDS = {"false", "0", "no", "off"}


class CliError(Exception):
    """Fatal CLI problem carrying its exit code."""

    def __init__(self, message: str, code: int) -> None:
        super().__init__(message)
        self.code = code


def fmt_float(x: float) -> str:
    """Shortest decimal that round-trips to the same float."""
    return repr(float(x))


def parse_config(path: str) -> dict:
    """Parse a flat key=value config file into typed values."""
    values: dict = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read config file {path}: {exc}", EXIT_BAD_ARGS)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(
                f"{path}:{lineno}: expected key=value, got {raw!r}", EXIT_BAD_ARGS)
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in CONFIG_KEYS:
            raise CliError(f"{path}:{lineno}: unknown config key {key!r}",
                           EXIT_BAD_ARGS)
        typ = CONFIG_KEYS[key]
        try:
            if typ is bool:
                lowered = value.lower()
                if lowered in _TRUE_WORDS:
                    values[key] = True
                elif lowered in _FALSE_WORDS:
                    values[key] = False
                else:
                    raise ValueError(f"not a boolean: {value!r}")
            else:
                values[key] = typ(value)
        except ValueError as exc:
            raise CliError(f"{path}:{lineno}: bad value for {key}: {exc}",
                           EXIT_BAD_ARGS)
    return values


def _parse_int_list(text: str, what: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise CliError(f"bad {what} list: {text!r}", EXIT_BAD_ARGS)


class Client:
    """Minimal POST/JSON client; in-process unless a server URL is given."""

    def __init__(self, server: str | None) -> None:
        if server is None:
            import warnings
            with warnings.catch_warnings():
                # The in-process client pulls starlette.testclient, which
                # warns about its httpx dependency; not actionable here.
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service.app import app
            self._impl = TestClient(app, raise_server_exceptions=False)
        else:
            self._impl = httpx.Client(base_url=server, timeout=None)

    def post(self, path: str, payload: dict) -> dict:
        try:
            response = self._impl.post(path, json=payload)
        except httpx.HTTPError as exc:
            raise CliError(f"request to {path} failed: {exc}", EXIT_NUMERICAL)
        try:
            data = response.json()
        except ValueError:
            data = {"detail": response.text}
        if response.status_code >= 500:
            raise CliError(f"{path}: {data.get('detail', 'server error')}",
                           EXIT_NUMERICAL)
        if response.status_code >= 400:
            raise CliError(f"{path}: {data.get('detail', 'bad request')}",
                           EXIT_BAD_ARGS)
        return data

    def close(self) -> None:
        self._impl.close()


def _resolve_seed(cli_seed: int | None, config: dict) -> int:
    if cli_seed is not None:
        return cli_seed
    if "seed" in config:
        return config["seed"]
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise CliError(f"{SEED_ENV_VAR} must be an integer, got {env!r}",
                           EXIT_BAD_ARGS)
    return 0


def _experiment_payload(ns: argparse.Namespace, config: dict,
                        defaults: dict) -> dict:
    """Merge defaults, config file, and CLI flags (flags win)."""
    payload = dict(defaults)
    for key in ("d", "m", "sigma", "ell", "tau", "n_ens", "runs",
                "loc_radius", "obs_sites", "n_draws", "perturb_obs"):
        if key in config:
            payload[key] = config[key]
    if "methods" in config:
        payload["methods"] = [m.strip() for m in config["methods"].split(",")]
    for key in ("d", "m", "sigma", "ell", "tau", "n_ens", "runs",
                "loc_radius", "obs_sites", "n_draws", "perturb_obs"):
        value = getattr(ns, key, None)
        if value is not None:
            payload[key] = value
    if getattr(ns, "methods", None) is not None:
        payload["methods"] = [m.strip() for m in ns.methods.split(",")]
    payload["seed"] = _resolve_seed(ns.seed, config)
    return payload


def _out_path(ns: argparse.Namespace, filename: str) -> Path:
    out_dir = Path(ns.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir / filename


def _timing_row(record: dict) -> str:
    return ",".join([
        record["method"],
        record["axis"],
        str(record["axis_value"]),
        fmt_float(record["fit_time_s"]),
        fmt_float(record["predict_time_s"]),
        fmt_float(record["rmse"]),
        str(record["runs"]),
        str(record["seed"]),
    ])


def cmd_demo(ns: argparse.Namespace, config: dict, client: Client) -> int:
    payload = _experiment_payload(ns, config, defaults={"d": 200})
    data = client.post("/demo", payload)
    positions = data["positions"]
    truth = data["truth"]
    obs_value_at = dict(zip(data["obs_indices"], data["obs_values"]))
    lines = [POSTERIOR_HEADER]
    for result in data["results"]:
        method = result["method"]
        mean, std = result["post_mean"], result["post_std"]
        draws = result["draws"]
        for i in range(len(positions)):
            observed = i in obs_value_at
            base = ",".join([
                method,
                str(i),
                fmt_float(positions[i]),
                fmt_float(truth[i]),
                "1" if observed else "0",
                fmt_float(obs_value_at[i]) if observed else "",
                fmt_float(mean[i]),
                fmt_float(std[i]),
            ])
            lines.append(f"{base},-1,")
            for k, draw in enumerate(draws):
                lines.append(f"{base},{k},{fmt_float(draw[i])}")
    path = _out_path(ns, "posterior_samples.csv")
    path.write_text("\n".join(lines) + "\n")
    print(f"wrote {path} ({len(lines) - 1} data rows)")
    return EXIT_OK


def _cmd_sweep(ns: argparse.Namespace, config: dict, client: Client,
               axis: str) -> int:
    if axis == "observations":
        defaults = {"d": 800}
        default_values = DEFAULT_OBS_VALUES
        filename = "timing_vs_observations.csv"
    else:
        defaults = {"d": 800}
        default_values = DEFAULT_DIM_VALUES
        filename = "timing_vs_dimensions.csv"
    payload = _experiment_payload(ns, config, defaults=defaults)
    values_text = ns.values if ns.values is not None else config.get(
        "values", default_values)
    values = _parse_int_list(values_text, "values")
    if not values:
        raise CliError("values list is empty", EXIT_BAD_ARGS)
    payload["axis"] = axis
    path = _out_path(ns, filename)
    written = 0
    # One request per sweep value keeps partial results on disk if a later
    # point fails.
    with open(path, "w") as handle:
        handle.write(TIMING_HEADER + "\n")
        handle.flush()
        for value in values:
            data = client.post("/sweep", {**payload, "values": [value]})
            for record in data["records"]:
                handle.write(_timing_row(record) + "\n")
                written += 1
            handle.flush()
    print(f"wrote {path} ({written} data rows)")
    return EXIT_OK


def cmd_equivalence(ns: argparse.Namespace, config: dict, client: Client) -> int:
    payload = {
        "instances": ns.instances,
        "seed": _resolve_seed(ns.seed, config),
    }
    data = client.post("/equivalence", payload)
    print(f"max relative difference over {data['n_instances']} instances: "
          f"{fmt_float(data['max_rel_diff'])}")
    if data["passed"]:
        print(f"PASS (threshold {fmt_float(data['threshold'])})")
        return EXIT_OK
    print(f"FAIL (threshold {fmt_float(data['threshold'])})")
    return EXIT_CHECK_FAILED


def cmd_moments_check(ns: argparse.Namespace, config: dict,
                      client: Client) -> int:
    payload = {
        "n_draws": ns.draws,
        "seed": _resolve_seed(ns.seed, config),
    }
    data = client.post("/moments-check", payload)
    print(f"draws: {data['n_draws']}")
    for i, (err, tol) in enumerate(zip(data["mean_abs_err"], data["mean_tol"])):
        print(f"mean[{i}] abs err {fmt_float(err)} (tol {fmt_float(tol)})")
    print(f"cov Frobenius rel err {fmt_float(data['cov_fro_rel_err'])} "
          f"(tol {fmt_float(data['cov_rel_tol'])})")
    if data["passed"]:
        print("PASS")
        return EXIT_OK
    print("FAIL")
    return EXIT_CHECK_FAILED


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None,
                        help=f"root seed (falls back to ${SEED_ENV_VAR}, then 0)")
    parser.add_argument("--config", type=str, default=None,
                        help="flat key=value config file; flags override it")
    parser.add_argument("--server", type=str, default=None,
                        help="remote service URL (default: in-process)")


def _add_experiment_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--d", type=int, default=None, help="grid size")
    parser.add_argument("--m", type=int, default=None,
                        help="observation count (default d/5)")
    parser.add_argument("--n-ens", dest="n_ens", type=int, default=None,
                        help="ensemble size")
    parser.add_argument("--sigma", type=float, default=None,
                        help="prior standard deviation")
    parser.add_argument("--ell", type=float, default=None, help="length-scale")
    parser.add_argument("--tau", type=float, default=None,
                        help="observation noise std")
    parser.add_argument("--runs", type=int, default=None,
                        help="timing repetitions (odd, >= 3)")
    parser.add_argument("--methods", type=str, default=None,
                        help=f"comma list from {DEFAULT_METHODS}")
    parser.add_argument("--out-dir", dest="out_dir", type=str, default=".",
                        help="directory for CSV outputs")
    parser.add_argument("--perturb-obs", dest="perturb_obs",
                        action=argparse.BooleanOptionalAction, default=None,
                        help="perturb observations in the ensemble analysis")
    parser.add_argument("--loc-radius", dest="loc_radius", type=float,
                        default=None, help="localization radius (default 2*ell)")
    parser.add_argument("--obs-sites", dest="obs_sites",
                        choices=["even", "random"], default=None,
                        help="observation site layout")
    parser.add_argument("--n-draws", dest="n_draws", type=int, default=None,
                        help="posterior draws per method")
    _add_common_flags(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matheron-enkf",
        description="Benchmark CLI for exact, ensemble, and localized "
                    "Gaussian analysis updates.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    demo = sub.add_parser("demo", help="one problem, all methods, "
                                       "posterior_samples.csv")
    _add_experiment_flags(demo)
    demo.set_defaults(func=cmd_demo)

    sweep_obs = sub.add_parser("sweep-obs",
                               help="timing sweep over observation counts")
    _add_experiment_flags(sweep_obs)
    sweep_obs.add_argument("--values", type=str, default=None,
                           help=f"comma list of m values "
                                f"(default {DEFAULT_OBS_VALUES})")
    sweep_obs.set_defaults(func=lambda ns, config, client: _cmd_sweep(
        ns, config, client, "observations"))

    sweep_dim = sub.add_parser("sweep-dim",
                               help="timing sweep over grid sizes")
    _add_experiment_flags(sweep_dim)
    sweep_dim.add_argument("--values", type=str, default=None,
                           help=f"comma list of d values "
                                f"(default {DEFAULT_DIM_VALUES})")
    sweep_dim.set_defaults(func=lambda ns, config, client: _cmd_sweep(
        ns, config, client, "dimensions"))

    equivalence = sub.add_parser(
        "equivalence",
        help="both analysis routes on random instances; report disagreement")
    equivalence.add_argument("--instances", type=int, default=100,
                             help="number of random instances")
    _add_common_flags(equivalence)
    equivalence.set_defaults(func=cmd_equivalence)

    moments = sub.add_parser(
        "moments-check",
        help="Monte Carlo moment test of the pathwise update")
    moments.add_argument("--draws", type=int, default=200_000,
                         help="number of pathwise draws")
    _add_common_flags(moments)
    moments.set_defaults(func=cmd_moments_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        if code in (0, None):
            return EXIT_OK
        return EXIT_BAD_ARGS
    client = None
    try:
        config = parse_config(ns.config) if ns.config else {}
        client = Client(ns.server)
        return ns.func(ns, config, client)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    finally:
        if client is not None:
            client.close()


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
