"""plateau-scope: batch experiments from JSON configs to plot-ready CSV.

    plateau-scope run <config.json> [--samples N] [--seed S] [--out DIR]
    plateau-scope validate <config.json>

Experiment kinds: bound, exact (per-block heatmaps), mc (per-parameter
Monte-Carlo variances), tpe (2-design proximity), additivity (variance
additivity across two Hamiltonians), oracle-check (exact engine vs the
haar4 Monte-Carlo oracle with z-scores).  Outputs embed a header comment
with the config hash, seed, and derivative convention so a config rerun
reproduces files byte for byte.

Exit codes: 0 success, 2 config error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

from . import design, simulator, tpe
from .ansatz import AnsatzLayout, layout_from_json, validate
from .design import DiffSpec
from .gates import FAMILY_NAMES, PARAM_COUNTS
from .paulis import Hamiltonian, PauliString, parse_hamiltonian

KINDS = ("bound", "exact", "mc", "tpe", "additivity", "oracle-check")
STOCHASTIC_KINDS = ("mc", "tpe", "additivity", "oracle-check")


class ConfigError(ValueError):
    pass


def _require(config: dict, key: str, kind: str):
    if key not in config:
        raise ConfigError(f"kind {kind!r} requires the {key!r} field")
    return config[key]


def _load_layout(config: dict, kind: str) -> AnsatzLayout:
    layout_obj = _require(config, "layout", kind)
    try:
        layout = layout_from_json(layout_obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad layout: {exc}") from exc
    problems = validate(layout)
    if problems:
        raise ConfigError("invalid layout: " + "; ".join(problems))
    return layout


def _load_hamiltonian(text, layout: AnsatzLayout) -> Hamiltonian:
    if not isinstance(text, str):
        raise ConfigError("hamiltonian must be a string in the text format")
    try:
        h = parse_hamiltonian(text, n_qubits=layout.n_qubits)
    except ValueError as exc:
        raise ConfigError(f"bad hamiltonian: {exc}") from exc
    if h.n_qubits != layout.n_qubits:
        raise ConfigError(
            f"hamiltonian acts on {h.n_qubits} qubits, layout has {layout.n_qubits}"
        )
    return h


def _effective_config(config: dict, args: argparse.Namespace) -> dict:
    merged = dict(config)
    if args.samples is not None:
        merged["samples"] = args.samples
    if args.seed is not None:
        merged["seed"] = args.seed
    return merged


def _check_config(config: dict) -> None:
    kind = config.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"kind must be one of {', '.join(KINDS)}; got {kind!r}")
    if kind in STOCHASTIC_KINDS:
        if not isinstance(config.get("seed"), int):
            raise ConfigError(f"kind {kind!r} requires an integer 'seed'")
        if not isinstance(config.get("samples"), int) or config["samples"] < 2:
            raise ConfigError(f"kind {kind!r} requires integer 'samples' >= 2")
    if kind == "tpe":
        families = _require(config, "families", kind)
        if families != "all" and not (
            isinstance(families, list) and families
        ):
            raise ConfigError("'families' must be a nonempty list or \"all\"")
        for name in [] if families == "all" else families:
            if name not in FAMILY_NAMES:
                raise ConfigError(f"unknown gate family {name!r}")
        return
    layout = _load_layout(config, kind)
    if kind == "additivity":
        pair = _require(config, "hamiltonians", kind)
        if not (isinstance(pair, list) and len(pair) == 2):
            raise ConfigError("'hamiltonians' must list exactly two text blocks")
        for text in pair:
            _load_hamiltonian(text, layout)
    else:
        _load_hamiltonian(_require(config, "hamiltonian", kind), layout)
    if kind in ("mc", "additivity"):
        family = _require(config, "family", kind)
        if family not in FAMILY_NAMES:
            raise ConfigError(f"unknown gate family {family!r}")
        convention = config.get("convention", "half")
        if convention not in ("half", "full"):
            raise ConfigError("convention must be 'half' or 'full'")
        if family == "haar4":
            raise ConfigError(
                "per-parameter Monte-Carlo needs a parametric family; "
                "use kind 'oracle-check' for haar4"
            )
        if family == "number_conserving":
            raise ConfigError(
                "number_conserving slots are not Pauli rotations; "
                "this family only participates in TPE benchmarking"
            )
    if kind == "oracle-check":
        block_id = config.get("block_id")
        if block_id is not None:
            try:
                layout.block(block_id)
            except KeyError as exc:
                raise ConfigError(str(exc)) from exc


def _config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def _header(config: dict) -> str:
    seed = config.get("seed", "-")
    convention = config.get("convention", "-")
    return (
        f"# config_sha256={_config_hash(config)} seed={seed} "
        f"convention={convention}\n"
    )


def _qubits_label(qubits) -> str:
    return "-".join(str(q) for q in qubits)


def _run_heatmap(config: dict, layout: AnsatzLayout) -> list[str]:
    h = _load_hamiltonian(config["hamiltonian"], layout)
    mode = config["kind"]
    values = design.variance_heatmap(
        h, layout, mode=mode, generator_letter=config.get("generator", "Z")
    )
    rows = ["block_id,layer,qubits,value"]
    for block in layout.application_order():
        rows.append(
            f"{block.id},{block.layer},{_qubits_label(block.qubits)},"
            f"{values[block.id]:.12e}"
        )
    return rows


def _run_mc(config: dict, layout: AnsatzLayout) -> list[str]:
    h = _load_hamiltonian(config["hamiltonian"], layout)
    family = config["family"]
    convention = config.get("convention", "half")
    estimates = simulator.mc_variance_sweep(
        layout, family, h, config["samples"], config["seed"], convention
    )
    rows = ["param_index,block_id,layer,slot,variance,std_error,samples,seed"]
    for index, block_id, layer, slot in simulator.param_table(layout, family):
        est = estimates[index]
        rows.append(
            f"{index},{block_id},{layer},{slot},{est.variance:.12e},"
            f"{est.std_error:.12e},{est.sample_count},{est.seed}"
        )
    return rows


def _run_tpe(config: dict) -> list[str]:
    requested = config["families"]
    names = list(FAMILY_NAMES) if requested == "all" else list(requested)
    reports = tpe.tpe_benchmark(names, config["samples"], config["seed"])
    rows = ["family,samples,seed,lambda1,lambdainf,lambda2"]
    for r in reports:
        rows.append(
            f"{r.family},{r.sample_count},{r.master_seed},"
            f"{r.lambda1:.4f},{r.lambda_inf:.4f},{r.lambda2:.4f}"
        )
    return rows


def _run_additivity(config: dict, layout: AnsatzLayout) -> list[str]:
    texts = config["hamiltonians"]
    h1 = _load_hamiltonian(texts[0], layout)
    h2 = _load_hamiltonian(texts[1], layout)
    family = config["family"]
    convention = config.get("convention", "half")
    samples, seed = config["samples"], config["seed"]
    runs = [
        simulator.mc_variance_sweep(layout, family, h, samples, (seed, tag), convention)
        for tag, h in enumerate((h1, h2, h1 + h2))
    ]
    rows = [
        "param_index,block_id,layer,slot,var_h1,se_h1,var_h2,se_h2,"
        "var_sum,se_sum,difference,combined_se"
    ]
    for index, block_id, layer, slot in simulator.param_table(layout, family):
        e1, e2, es = (run[index] for run in runs)
        diff = es.variance - e1.variance - e2.variance
        combined = math.sqrt(
            e1.std_error**2 + e2.std_error**2 + es.std_error**2
        )
        rows.append(
            f"{index},{block_id},{layer},{slot},"
            f"{e1.variance:.12e},{e1.std_error:.12e},"
            f"{e2.variance:.12e},{e2.std_error:.12e},"
            f"{es.variance:.12e},{es.std_error:.12e},"
            f"{diff:.12e},{combined:.12e}"
        )
    return rows


def _run_oracle_check(config: dict, layout: AnsatzLayout) -> list[str]:
    h = _load_hamiltonian(config["hamiltonian"], layout)
    letter = config.get("generator", "Z")
    blocks = (
        [layout.block(config["block_id"])]
        if config.get("block_id") is not None
        else layout.application_order()
    )
    rows = ["block_id,layer,exact,mc,std_error,zscore"]
    for block in blocks:
        gen = PauliString.from_map(layout.n_qubits, {block.qubits[0]: letter})
        spec = DiffSpec(block.id, gen)
        exact = design.exact_variance(h, layout, spec)
        est = simulator.mc_variance(
            layout, "haar4", h, spec, config["samples"], (config["seed"], block.id)
        )
        z = (est.variance - exact) / est.std_error if est.std_error > 0 else 0.0
        rows.append(
            f"{block.id},{block.layer},{exact:.12e},{est.variance:.12e},"
            f"{est.std_error:.12e},{z:.6f}"
        )
    return rows


def run_experiment(config: dict) -> list[str]:
    """Execute one validated config; returns the CSV body as a list of rows."""
    kind = config["kind"]
    if kind == "tpe":
        return _run_tpe(config)
    layout = _load_layout(config, kind)
    if kind in ("bound", "exact"):
        return _run_heatmap(config, layout)
    if kind == "mc":
        return _run_mc(config, layout)
    if kind == "additivity":
        return _run_additivity(config, layout)
    return _run_oracle_check(config, layout)


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        config = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    config = _effective_config(config, args)
    try:
        _check_config(config)
        rows = run_experiment(config)
    except (ConfigError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except tpe.ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    out_dir = Path(args.out) if args.out else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / config.get("out", f"{config['kind']}.csv")
    out_path.write_text(_header(config) + "\n".join(rows) + "\n")
    print(out_path)
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        config = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        _check_config(config)
    except (ConfigError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print("ok")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plateau-scope",
        description="gradient-variance experiments for local-block ansatz circuits",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="execute a config and write its CSV output")
    run_p.add_argument("config")
    run_p.add_argument("--samples", type=int, default=None)
    run_p.add_argument("--seed", type=int, default=None)
    run_p.add_argument("--out", default=None)
    run_p.set_defaults(func=_cmd_run)
    val_p = sub.add_parser("validate", help="check a config without running it")
    val_p.add_argument("config")
    val_p.set_defaults(func=_cmd_validate)
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
