"""Command-line front end: adaptive runs, variant comparison tables, and
the random-initialization landscape study.

Fixture files are FCIDUMP (``.fcidump``) or JSON qubit-Hamiltonian
documents (``.json``); the molecule tag in output filenames is the fixture
stem, e.g. ``trace_h4_3.0_qubit_tetris.csv``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .chem import hamiltonian_from_json, jordan_wigner, parse_fcidump
from .engine import (
    AdaptConfig,
    AdaptTrace,
    check_convergence,
    depth_ratio,
    matched_record,
    measurement_ratio,
    reached_ground,
    run,
    screen_pool,
    select_single,
    select_tetris_batch,
)
from .minimize import OptimizerConfig, initialize_parameters, minimize
from .oracle import ground_state
from .pools import build_pool
from .statevec import Ansatz, StateVector, analytic_gradient, prepare

LANDSCAPE_COLUMNS = [
    "layer",
    "mode",
    "sample",
    "energy",
    "function_evaluations",
    "gradient_evaluations",
    "converged",
]


@dataclass
class RunConfig:
    fixtures: list = field(default_factory=list)
    pool: str = "qubit"
    variants: list = field(default_factory=lambda: ["adapt"])
    threshold: float = 1e-7
    max_layers: int = 100
    init_mode: str = "warm"
    samples: int = 300
    sample_low: float = -np.pi
    sample_high: float = np.pi
    out_dir: str = "out"
    seed: int = 0

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("sample count must be >= 1")


def load_hamiltonian(path: str):
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"fixture not found: {path}")
    text = p.read_text()
    if p.suffix == ".json":
        return hamiltonian_from_json(text)
    return jordan_wigner(parse_fcidump(text))


def _adapt_config(cfg: RunConfig, variant: str) -> AdaptConfig:
    return AdaptConfig(
        pool_kind=cfg.pool,
        variant=variant,
        pool_gradient_norm_threshold=cfg.threshold,
        max_layers=cfg.max_layers,
        optimizer=OptimizerConfig(),
        init_mode=cfg.init_mode,
        seed=cfg.seed,
    )


def _single_run(cfg: RunConfig, fixture: str, variant: str) -> AdaptTrace:
    h = load_hamiltonian(fixture)
    electrons = h.hf_reference.count("1")
    pool = build_pool(cfg.pool, h.qubit_count, electrons)
    truth = ground_state(h)
    return run(h, pool, _adapt_config(cfg, variant), truth)


def _write_trace(trace: AdaptTrace, out: Path, stem: str, pool: str, variant: str):
    out.mkdir(parents=True, exist_ok=True)
    base = f"trace_{stem}_{pool}_{variant}"
    (out / f"{base}.csv").write_text(trace.to_csv())
    (out / f"{base}.json").write_text(trace.to_json())
    (out / f"checkpoint_{stem}_{pool}_{variant}.json").write_text(trace.checkpoint())


def cmd_run(cfg: RunConfig) -> int:
    status = 0
    out = Path(cfg.out_dir)
    for fixture in cfg.fixtures:
        stem = Path(fixture).stem.replace(".fcidump", "")
        for variant in cfg.variants:
            try:
                trace = _single_run(cfg, fixture, variant)
            except FileNotFoundError as exc:
                print(str(exc), file=sys.stderr)
                status = 2
                continue
            _write_trace(trace, out, stem, cfg.pool, variant)
            if trace.records:
                last = trace.records[-1]
                print(
                    f"{stem} {cfg.pool}/{variant}: {trace.reason} after "
                    f"{len(trace.records) - 1} layers | E={last.energy:.8f} "
                    f"err={last.energy_error:.3e} depth={last.depth} "
                    f"cnots={last.cnot_count} measurements={last.measurements}"
                )
            else:
                print(f"{stem} {cfg.pool}/{variant}: {trace.reason}")
            if trace.reason in ("max-layers", "optimizer-failure"):
                status = max(status, 1)
    return status


def _molecule(stem: str) -> str:
    return stem.split("_")[0]


def cmd_compare(cfg: RunConfig) -> int:
    """Depth-ratio and measurement tables over the fixture geometries.

    Geometries where either variant failed to reach the ground state are
    excluded from the averages.
    """
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    by_molecule: dict = {}
    for fixture in cfg.fixtures:
        stem = Path(fixture).stem.replace(".fcidump", "")
        traces = {}
        for variant in ("adapt", "tetris"):
            traces[variant] = _single_run(cfg, fixture, variant)
            _write_trace(traces[variant], out, stem, cfg.pool, variant)
        by_molecule.setdefault(_molecule(stem), []).append((stem, traces))

    rows1, rows2 = [], []
    any_valid = False
    for molecule, entries in sorted(by_molecule.items()):
        dratios, mratios, used = [], [], []
        for stem, traces in entries:
            ok = reached_ground(traces["adapt"]) and reached_ground(traces["tetris"])
            if not ok:
                print(f"excluding {stem}: a variant failed to reach the ground state")
                continue
            dratios.append(depth_ratio(traces["adapt"], traces["tetris"]))
            mratios.append(measurement_ratio(traces["adapt"], traces["tetris"]))
            used.append(stem)
        if not used:
            continue
        any_valid = True
        avg_d = float(np.mean(dratios))
        avg_m = float(np.mean(mratios))
        rows1.append([molecule, cfg.pool, len(used), f"{avg_d:.4f}"])
        rows2.append(
            [molecule, cfg.pool, len(used), f"{100.0 * (1 - 1 / avg_m):.1f}", f"{avg_m:.4f}"]
        )
    if not any_valid:
        print("no geometry had both variants reach the ground state", file=sys.stderr)
        return 1
    _write_csv(out / "table1.csv", ["molecule", "pool", "geometries", "depth_ratio"], rows1)
    _write_csv(
        out / "table2.csv",
        ["molecule", "pool", "geometries", "measurement_reduction_percent", "measurement_ratio"],
        rows2,
    )
    print(f"wrote {out / 'table1.csv'} and {out / 'table2.csv'}")
    return 0


def _write_csv(path: Path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(header)
    w.writerows(rows)
    path.write_text(buf.getvalue())


def landscape_study(cfg: RunConfig, fixture: str, variant: str):
    """Warm/cold/random minima per adaptive layer.

    The adaptive loop itself advances with the warm-start optimum; the cold
    and random optimizations are probes of the same fixed-ansatz landscape.
    Yields (layer, rows) with one row per optimization.
    """
    h = load_hamiltonian(fixture)
    electrons = h.hf_reference.count("1")
    pool = build_pool(cfg.pool, h.qubit_count, electrons)
    truth = ground_state(h)
    acfg = _adapt_config(cfg, variant)

    state = StateVector.basis(h.hf_reference)
    ops: list = []
    params = np.zeros(0)
    results = []
    for layer in range(1, cfg.max_layers + 1):
        grads = screen_pool(state, h, pool)
        if check_convergence(grads, acfg.pool_gradient_norm_threshold):
            break
        if variant == "adapt":
            batch = [select_single(grads, pool)]
        else:
            batch = select_tetris_batch(grads, pool, h.qubit_count, acfg.eligibility_floor)
            if not batch:
                break
        ops.extend(batch)
        ansatz = Ansatz(h.hf_reference, tuple(ops), tuple(np.zeros(len(ops))))

        def objective(x):
            return h.energy(prepare(ansatz.with_parameters(x)))

        def gradient(x):
            return analytic_gradient(ansatz.with_parameters(x), h)

        rows = []
        warm0 = initialize_parameters(params, len(ops), "warm")
        res_warm = minimize(objective, gradient, warm0, acfg.optimizer)
        rows.append([layer, "warm", 0, res_warm.energy, res_warm.function_evaluations,
                     res_warm.gradient_evaluations, res_warm.converged])
        res_cold = minimize(objective, gradient, np.zeros(len(ops)), acfg.optimizer)
        rows.append([layer, "cold", 0, res_cold.energy, res_cold.function_evaluations,
                     res_cold.gradient_evaluations, res_cold.converged])
        for k in range(cfg.samples):
            rng = np.random.default_rng([cfg.seed, layer, k])
            x0 = rng.uniform(cfg.sample_low, cfg.sample_high, size=len(ops))
            res = minimize(objective, gradient, x0, acfg.optimizer)
            rows.append([layer, "random", k, res.energy, res.function_evaluations,
                         res.gradient_evaluations, res.converged])
        results.append((layer, rows))

        params = np.asarray(res_warm.parameters)
        state = prepare(ansatz.with_parameters(params))
    return results


def cmd_landscape(cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    variant = cfg.variants[0]
    status = 0
    for fixture in cfg.fixtures:
        stem = Path(fixture).stem.replace(".fcidump", "")
        try:
            layers = landscape_study(cfg, fixture, variant)
        except FileNotFoundError as exc:
            print(str(exc), file=sys.stderr)
            status = 2
            continue
        for layer, rows in layers:
            _write_csv(out / f"landscape_{stem}_layer{layer}.csv", LANDSCAPE_COLUMNS, rows)
        print(f"{stem} {cfg.pool}/{variant}: landscape over {len(layers)} layers -> {out}")
    return status


# ---------------------------------------------------------------------------
# configuration plumbing


def parse_config_file(text: str) -> dict:
    """Simple key = value lines; '#' starts a comment; lists are
    comma-separated."""
    out = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {ln}: expected 'key = value'")
        key, val = (part.strip() for part in line.split("=", 1))
        out[key] = val
    return out


def _build_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        doc = parse_config_file(Path(args.config).read_text())
        if "fixture" in doc:
            cfg.fixtures = [f.strip() for f in doc["fixture"].split(",") if f.strip()]
        if "pool" in doc:
            cfg.pool = doc["pool"]
        if "variant" in doc:
            cfg.variants = [v.strip() for v in doc["variant"].split(",") if v.strip()]
        if "threshold" in doc:
            cfg.threshold = float(doc["threshold"])
        if "max_layers" in doc:
            cfg.max_layers = int(doc["max_layers"])
        if "init" in doc:
            cfg.init_mode = doc["init"]
        if "samples" in doc:
            cfg.samples = int(doc["samples"])
        if "out" in doc:
            cfg.out_dir = doc["out"]
        if "seed" in doc:
            cfg.seed = int(doc["seed"])
    if args.fixture:
        cfg.fixtures = args.fixture
    if args.pool:
        cfg.pool = args.pool
    if args.variant:
        cfg.variants = args.variant
    if args.threshold is not None:
        cfg.threshold = args.threshold
    if args.max_layers is not None:
        cfg.max_layers = args.max_layers
    if args.init:
        cfg.init_mode = args.init
    if args.samples is not None:
        cfg.samples = args.samples
    if args.out:
        cfg.out_dir = args.out
    if args.seed is not None:
        cfg.seed = args.seed
    if not cfg.fixtures:
        raise SystemExit("no fixtures given (use --fixture or a config file)")
    return cfg


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="adaptvqe", description="Adaptive VQE simulation engine."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", "compare", "landscape"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--fixture", action="append", help="fixture path (repeatable)")
        p.add_argument("--pool", choices=["qubit", "qe", "fermionic"])
        p.add_argument("--variant", action="append", choices=["adapt", "tetris"])
        p.add_argument("--threshold", type=float)
        p.add_argument("--max-layers", dest="max_layers", type=int)
        p.add_argument("--init", choices=["warm", "cold", "random"])
        p.add_argument("--samples", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--out")
    args = parser.parse_args(argv)
    cfg = _build_config(args)
    if args.command == "run":
        return cmd_run(cfg)
    if args.command == "compare":
        return cmd_compare(cfg)
    return cmd_landscape(cfg)


if __name__ == "__main__":
    raise SystemExit(main())
