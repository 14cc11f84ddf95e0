"""Command-line front end.

Subcommands ``simulate``, ``analytic`` and ``sweep {rho,item-size,stationarity}``
write plot-ready CSV. Settings come from, in increasing precedence: built-in
defaults, a ``--config`` file of ``key=value`` lines, and command-line flags.
Config keys are flag names without the leading dashes (``gamma-policy=approx``).

Exit codes: 0 success, 1 I/O failure, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from . import analytic, experiments
from .model import GammaPolicy, InvalidParams, ModelParams, PolicyMismatch
from .simulator import run

DEFAULT_RHO_GRID = (0.01, 0.02, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30,
                    0.40, 0.50, 0.60, 0.70, 0.80, 0.90, 1.00)
DEFAULT_PRESSURES = (1e-1, 1e-2, 1e-3, 1e-4)

DEFAULTS = {
    "agents": "100",
    "items": "100",
    "capacity": "10",
    "pressure": "0.1",
    "pressures": ",".join(repr(p) for p in DEFAULT_PRESSURES),
    "nu": "1000",
    "nus": "100,1000",
    "reference-nu": "100",
    "reference-items": "100",
    "rho-grid": ",".join(repr(r) for r in DEFAULT_RHO_GRID),
    "realizations": "20",
    "seed": "0",
    "gamma-policy": "auto",
    "jobs": "1",
    "band": "0.02",
}


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def load_config(text: str) -> dict[str, str]:
    """Parse flat ``key=value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.lstrip("-")] = value
    return values


def dump_config(values: dict[str, str]) -> str:
    return "".join(f"{k}={v}\n" for k, v in values.items())


def fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def write_csv(stream, header: list[str], rows, meta: dict | None = None) -> None:
    for key, value in (meta or {}).items():
        stream.write(f"# {key}={fmt(value)}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])


def _parse_cell(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def read_csv(source) -> tuple[dict, list[dict]]:
    """Read a CSV written by this tool: ``(metadata, rows)`` with numbers parsed."""
    text = Path(source).read_text(encoding="utf-8") if not hasattr(source, "read") \
        else source.read()
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key] = _parse_cell(value)
        else:
            body.append(line)
    reader = csv.DictReader(body)
    rows = [{k: _parse_cell(v) for k, v in row.items()} for row in reader]
    return meta, rows


# -- option parsing -----------------------------------------------------------

def _int(cfg, key, minimum=None):
    try:
        value = int(cfg[key])
    except ValueError:
        raise ConfigError(key, f"expected an integer, got {cfg[key]!r}") from None
    if minimum is not None and value < minimum:
        raise ConfigError(key, f"must be >= {minimum}, got {value}")
    return value


def _float(cfg, key):
    try:
        return float(cfg[key])
    except ValueError:
        raise ConfigError(key, f"expected a number, got {cfg[key]!r}") from None


def _list(cfg, key, cast=float):
    try:
        values = [cast(s) for s in cfg[key].split(",") if s.strip()]
    except ValueError:
        raise ConfigError(key, f"expected a comma-separated list, got {cfg[key]!r}") from None
    if not values:
        raise ConfigError(key, "empty list")
    return values


def _gamma(cfg, capacity):
    text = cfg["gamma-policy"]
    if text == "auto":
        return GammaPolicy("exact-m1" if capacity == 1 else "approx")
    try:
        return GammaPolicy.parse(text)
    except ValueError as exc:
        raise ConfigError("gamma-policy", str(exc)) from None


def _params(cfg, pressure=None) -> ModelParams:
    agents = _int(cfg, "agents")
    items = _int(cfg, "items")
    if cfg.get("rho") is not None:
        try:
            capacity = experiments.capacity_for(_float(cfg, "rho"), items)
        except experiments.NonIntegerCapacity as exc:
            raise ConfigError("rho", str(exc)) from None
    else:
        capacity = _int(cfg, "capacity")
    p = _float(cfg, "pressure") if pressure is None else pressure
    try:
        return ModelParams(agents, items, capacity, p, _float(cfg, "nu"),
                           gamma_policy=_gamma(cfg, capacity))
    except InvalidParams as exc:
        flag = {"n_agents": "agents", "n_items": "items", "interactions_per_pair": "nu"}
        raise ConfigError(flag.get(exc.field, exc.field), exc.message) from None


# -- subcommands ---------------------------------------------------------------

def cmd_simulate(cfg, out) -> None:
    params = _params(cfg)
    seed = _int(cfg, "seed", 0)
    sample_every = _int(cfg, "sample-every", 1) if cfg.get("sample-every") else None
    want_traj = cfg.get("trajectory-out") is not None
    outcome = run(params, seed, sample_every=sample_every, trajectory=want_traj)
    state = outcome.final_state
    rows = [(c + 1 if c != state.advertised_code else "a", int(owners),
             int(owners) / state.n_agents)
            for c, owners in enumerate(state.owner_counts)]
    write_csv(out, ["item", "owners", "share"], rows)
    if want_traj:
        with open(cfg["trajectory-out"], "w", encoding="utf-8", newline="") as fh:
            write_csv(fh, ["recommendations", "f_a"], outcome.trajectory)


def cmd_analytic(cfg, out) -> None:
    params = _params(cfg)
    try:
        rates = analytic.build_rates(params)
    except PolicyMismatch as exc:
        raise ConfigError("gamma-policy", str(exc)) from None
    dist = analytic.stationary(rates)
    expected = dist.mean() / params.n_agents
    meta = {"gamma": float(rates.gamma_used), "expected_share": float(expected)}
    rows = zip(range(params.n_agents + 1), rates.up.tolist(), rates.down.tolist(),
               rates.stay.tolist(), dist.pi.tolist())
    write_csv(out, ["state", "up", "down", "stay", "pi"], rows, meta)
    print(f"E[F_a] = {fmt(float(expected))}", file=sys.stderr)


def _check_pressures(values, key):
    for p in values:
        if not 0.0 <= p <= 1.0:
            raise ConfigError(key, f"pressure must lie in [0, 1], got {p}")
    return values


def cmd_sweep(cfg, out) -> None:
    kind = cfg["experiment"]
    realizations = _int(cfg, "realizations", 1)
    seed = _int(cfg, "seed", 0)
    jobs = _int(cfg, "jobs", 1)
    grid = _list(cfg, "rho-grid")
    agents = _int(cfg, "agents", 2)

    if kind == "rho":
        pressures = _check_pressures(_list(cfg, "pressures"), "pressures")
        base = _params(cfg, pressure=pressures[0])
        try:
            records = experiments.sweep_rho(base, grid, pressures, realizations, seed, jobs)
        except experiments.NonIntegerCapacity as exc:
            raise ConfigError("rho-grid", str(exc)) from None
        header = ["rho", "capacity", "pressure", "nu", "realizations", "f_a_sim_mean",
                  "f_a_sim_std", "f_a_analytic", "f_top5", "f_min", "seed_base"]
        rows = [(r.rho, r.params.capacity, r.params.pressure,
                 float(r.params.interactions_per_pair), r.stats.n_realizations, r.stats.f_a,
                 r.stats.std_f_a, r.analytic_f_a, r.stats.f_top, r.stats.f_min, r.seed_base)
                for r in records]
    elif kind == "item-size":
        items = _list(cfg, "items", int)
        pressure = _check_pressures([_float(cfg, "pressure")], "pressure")[0]
        rows_ = experiments.item_size_experiment(
            items, grid, pressure, realizations, seed, n_agents=agents, nu=_float(cfg, "nu"),
            reference_items=_int(cfg, "reference-items", 1), jobs=jobs)
        header = ["rho", "items", "capacity", "pressure", "nu", "realizations", "f_a",
                  "f_a_ref", "ratio", "seed_base"]
        rows = [(r.rho, r.n_items, r.capacity, r.pressure, r.nu, realizations, r.f_a,
                 r.f_a_ref, r.ratio, seed) for r in rows_]
    elif kind == "stationarity":
        pressures = _check_pressures(_list(cfg, "pressures"), "pressures")
        reference = _float(cfg, "reference-nu")
        try:
            rows_ = experiments.stationarity_experiment(
                _list(cfg, "nus"), reference, grid, pressures, realizations, seed,
                n_agents=agents, n_items=_int(cfg, "items", 1), band=_float(cfg, "band"),
                jobs=jobs)
        except experiments.NonIntegerCapacity as exc:
            raise ConfigError("rho-grid", str(exc)) from None
        header = ["rho", "capacity", "pressure", "nu", "reference_nu", "realizations", "f_a",
                  "f_a_ref", "ratio", "stationary", "seed_base"]
        rows = [(r.rho, r.capacity, r.pressure, r.nu, reference, realizations, r.f_a,
                 r.f_a_ref, r.ratio, r.stationary, seed) for r in rows_]
    else:
        raise ConfigError("experiment", f"unknown sweep {kind!r}")
    write_csv(out, header, rows)


COMMANDS = {"simulate": cmd_simulate, "analytic": cmd_analytic, "sweep": cmd_sweep}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="srmwa", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    S = argparse.SUPPRESS

    def common(p):
        p.add_argument("--config", default=S, help="key=value settings file")
        p.add_argument("--out", default=S, help="output CSV (default stdout)")
        p.add_argument("--agents", default=S)
        p.add_argument("--items", default=S)
        p.add_argument("--nu", default=S)
        p.add_argument("--seed", default=S)

    p = sub.add_parser("simulate", help="one run; final per-item shares")
    common(p)
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--capacity", default=S)
    grp.add_argument("--rho", default=S)
    p.add_argument("--pressure", default=S)
    p.add_argument("--sample-every", dest="sample-every", default=S)
    p.add_argument("--trajectory-out", dest="trajectory-out", default=S,
                   help="also write the (recommendations, F_a) trajectory here")

    p = sub.add_parser("analytic", help="transition rates, stationary distribution, E[F_a]")
    common(p)
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--capacity", default=S)
    grp.add_argument("--rho", default=S)
    p.add_argument("--pressure", default=S)
    p.add_argument("--gamma-policy", dest="gamma-policy", default=S,
                   help="auto | exact-m1 | approx | fixed:<v>")

    p = sub.add_parser("sweep", help="parameter sweeps")
    p.add_argument("experiment", choices=["rho", "item-size", "stationarity"])
    common(p)
    p.add_argument("--capacity", default=S)
    p.add_argument("--pressure", default=S)
    p.add_argument("--pressures", default=S)
    p.add_argument("--nus", default=S)
    p.add_argument("--reference-nu", dest="reference-nu", default=S)
    p.add_argument("--reference-items", dest="reference-items", default=S)
    p.add_argument("--rho-grid", dest="rho-grid", default=S)
    p.add_argument("--realizations", default=S)
    p.add_argument("--gamma-policy", dest="gamma-policy", default=S)
    p.add_argument("--band", default=S)
    p.add_argument("--jobs", default=S)
    return parser


def main(argv=None) -> int:
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    cfg = dict(DEFAULTS)
    try:
        if "config" in args:
            try:
                text = Path(args.pop("config")).read_text(encoding="utf-8")
            except OSError as exc:
                print(f"error: cannot read config: {exc}", file=sys.stderr)
                return 1
            cfg.update(load_config(text))
        cfg.update(args)
        out_path = cfg.pop("out", None)
        buf = io.StringIO()
        COMMANDS[command](cfg, buf)
    except ConfigError as exc:
        print(f"error: invalid {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        if out_path is None:
            sys.stdout.write(buf.getvalue())
        else:
            with open(out_path, "w", encoding="utf-8", newline="") as fh:
                fh.write(buf.getvalue())
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
