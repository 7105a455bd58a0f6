"""Adaptive ansatz-growth loop with pool screening and trace recording.

One screening round measures the energy gradient of every pool operator
against the frozen current state (no operator grouping), so the cumulative
measurement count is always rounds * pool size.  The single-operator
variant appends the argmax-gradient operator; the batch variant greedily
tiles operators with pairwise disjoint supports in descending gradient
order, reusing the same screening round.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .chem import QubitHamiltonian
from .circuits import ansatz_report
from .minimize import (
    OptimizationFailure,
    OptimizerConfig,
    initialize_parameters,
    minimize,
)
from .oracle import GroundTruth, infidelity
from .pools import OperatorPool, PoolOperator, build_pool
from .statevec import (
    Ansatz,
    StateVector,
    _action,
    _gradient_against,
    analytic_gradient,
    count_determinants,
    expectation,
    prepare,
)

GROUND_INFIDELITY_TOL = 1e-6
EIGENSTATE_RESIDUAL_TOL = 1e-5
CHEMICAL_ACCURACY = 1.6e-3  # Hartree

CSV_COLUMNS = [
    "layer",
    "labels",
    "energy",
    "energy_error",
    "parameter_count",
    "cnot_count",
    "depth",
    "measurements",
    "infidelity",
    "determinant_count",
    "gradient_norm",
    "function_evaluations",
    "converged",
    "reason",
]


@dataclass
class AdaptConfig:
    pool_kind: str = "qubit"
    variant: str = "adapt"
    pool_gradient_norm_threshold: float = 1e-7
    max_layers: int = 100
    eligibility_floor: float = 1e-12
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    init_mode: str = "warm"
    seed: int = 0

    def __post_init__(self):
        if self.pool_gradient_norm_threshold <= 0 or self.eligibility_floor <= 0:
            raise ValueError("thresholds must be positive")
        if self.variant not in ("adapt", "tetris"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.init_mode not in ("warm", "cold", "random"):
            raise ValueError(f"unknown init mode {self.init_mode!r}")


@dataclass
class LayerRecord:
    layer: int
    labels: list  # operators appended to produce this state
    energy: float
    energy_error: float
    parameter_count: int
    cnot_count: int
    depth: int
    measurements: int  # cumulative gradient measurements
    infidelity: float
    determinant_count: int
    gradient_norm: float  # pool gradient norm screened at this state
    function_evaluations: int  # inner optimizer cost for this layer
    converged: bool
    reason: str = ""


@dataclass
class AdaptTrace:
    pool_kind: str
    variant: str
    qubit_count: int
    pool_size: int
    reference: str
    fci_energy: float
    records: list
    final_labels: list
    final_parameters: list
    reason: str = ""

    @property
    def converged(self) -> bool:
        return self.reason in ("converged-ground", "stalled-at-eigenstate")

    def to_json(self) -> str:
        doc = asdict(self)
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "AdaptTrace":
        doc = json.loads(text)
        doc["records"] = [LayerRecord(**r) for r in doc["records"]]
        return cls(**doc)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(CSV_COLUMNS)
        for r in self.records:
            row = asdict(r)
            row["labels"] = ";".join(r.labels)
            writer.writerow([row[c] for c in CSV_COLUMNS])
        return buf.getvalue()

    def checkpoint(self) -> str:
        return json.dumps(
            {
                "pool_kind": self.pool_kind,
                "qubit_count": self.qubit_count,
                "reference": self.reference,
                "labels": self.final_labels,
                "parameters": self.final_parameters,
            },
            indent=1,
        )


def restore_ansatz(checkpoint_text: str, pool: OperatorPool | None = None) -> Ansatz:
    """Rebuild the checkpointed ansatz bit-exactly (pools are deterministic)."""
    doc = json.loads(checkpoint_text)
    if pool is None:
        pool = build_pool(doc["pool_kind"], doc["qubit_count"])
    ops = tuple(pool.by_label(lbl) for lbl in doc["labels"])
    return Ansatz(doc["reference"], ops, tuple(doc["parameters"]))


# ---------------------------------------------------------------------------
# screening and selection


def screen_pool(state: StateVector, h: QubitHamiltonian, pool: OperatorPool) -> np.ndarray:
    """Gradient of every pool operator at parameter zero, in pool order."""
    hpsi = _action(h.pauli_sum).apply(state.amplitudes)
    return np.array([_gradient_against(hpsi, state, op.generator) for op in pool])


def check_convergence(gradients, threshold: float) -> bool:
    return float(np.linalg.norm(gradients)) < threshold


def select_single(gradients, pool: OperatorPool) -> PoolOperator:
    """Largest-|gradient| operator; ties break to the lowest pool index."""
    if len(pool) == 0:
        raise ValueError("cannot select from an empty pool")
    return pool[int(np.argmax(np.abs(gradients)))]


def select_tetris_batch(
    gradients, pool: OperatorPool, qubit_count: int, floor: float = 1e-12
) -> list:
    """Greedy disjoint-support batch in descending |gradient| order.

    Stops when the accepted supports cover every qubit or the eligible list
    is exhausted; an empty result signals a convergence-like stall.
    """
    if len(pool) == 0:
        raise ValueError("cannot select from an empty pool")
    mags = np.abs(np.asarray(gradients))
    order = sorted(range(len(pool)), key=lambda i: (-mags[i], i))
    covered: set = set()
    batch = []
    everything = set(range(qubit_count))
    for i in order:
        if mags[i] <= floor:
            break
        sup = pool[i].support
        if covered & sup:
            continue
        batch.append(pool[i])
        covered |= sup
        if covered == everything:
            break
    return batch


# ---------------------------------------------------------------------------
# the outer loop


def _classify_stop(state, h, truth, energy):
    infid = infidelity(state, truth)
    if infid < GROUND_INFIDELITY_TOL:
        return "converged-ground"
    hpsi = _action(h.pauli_sum).apply(state.amplitudes)
    resid = float(
        np.linalg.norm(hpsi - (energy - h.constant_offset) * state.amplitudes)
    )
    if resid < EIGENSTATE_RESIDUAL_TOL * max(1.0, abs(energy)):
        return "stalled-at-eigenstate"
    return "stalled-pool-gradient"


def run(
    h: QubitHamiltonian,
    pool: OperatorPool,
    cfg: AdaptConfig,
    truth: GroundTruth,
) -> AdaptTrace:
    """Grow, optimize, and record until pool-gradient convergence."""
    if h.qubit_count != pool.qubit_count:
        raise ValueError("Hamiltonian and pool qubit counts differ")
    trace = AdaptTrace(
        pool_kind=pool.kind,
        variant=cfg.variant,
        qubit_count=h.qubit_count,
        pool_size=len(pool),
        reference=h.hf_reference,
        fci_energy=truth.energy,
        records=[],
        final_labels=[],
        final_parameters=[],
    )
    if len(pool) == 0:
        trace.reason = "empty-pool"
        return trace

    state = StateVector.basis(h.hf_reference)
    ops: list = []
    params = np.zeros(0)
    pending_labels: list = []
    layer_fevals = 0
    rounds = 0

    def record(layer, gnorm, converged, reason):
        energy = h.energy(state)
        report = ansatz_report(Ansatz(h.hf_reference, tuple(ops), tuple(params)))
        trace.records.append(
            LayerRecord(
                layer=layer,
                labels=list(pending_labels),
                energy=energy,
                energy_error=energy - truth.energy,
                parameter_count=len(ops),
                cnot_count=report.cnot_count,
                depth=report.depth,
                measurements=rounds * len(pool),
                infidelity=infidelity(state, truth),
                determinant_count=count_determinants(state),
                gradient_norm=gnorm,
                function_evaluations=layer_fevals,
                converged=converged,
                reason=reason,
            )
        )

    layer = 0
    while True:
        grads = screen_pool(state, h, pool)
        rounds += 1
        gnorm = float(np.linalg.norm(grads))
        if check_convergence(grads, cfg.pool_gradient_norm_threshold):
            trace.reason = _classify_stop(state, h, truth, h.energy(state))
            record(layer, gnorm, True, trace.reason)
            break
        if layer >= cfg.max_layers:
            trace.reason = "max-layers"
            record(layer, gnorm, False, trace.reason)
            break
        if cfg.variant == "adapt":
            batch = [select_single(grads, pool)]
        else:
            batch = select_tetris_batch(
                grads, pool, h.qubit_count, cfg.eligibility_floor
            )
            if not batch:
                trace.reason = "empty-batch"
                record(layer, gnorm, False, trace.reason)
                break
        record(layer, gnorm, False, "")

        ops.extend(batch)
        params = initialize_parameters(
            params, len(ops), cfg.init_mode, seed=cfg.seed + 7919 * (layer + 1)
        )
        ansatz = Ansatz(h.hf_reference, tuple(ops), tuple(params))

        def objective(x):
            return h.energy(prepare(ansatz.with_parameters(x)))

        def gradient(x):
            return analytic_gradient(ansatz.with_parameters(x), h)

        try:
            result = minimize(objective, gradient, params, cfg.optimizer)
        except OptimizationFailure:
            pending_labels = [op.label for op in batch]
            layer_fevals = 0
            trace.reason = "optimizer-failure"
            record(layer + 1, gnorm, False, trace.reason)
            break
        params = np.asarray(result.parameters)
        state = prepare(ansatz.with_parameters(params))
        pending_labels = [op.label for op in batch]
        layer_fevals = result.function_evaluations
        layer += 1

    trace.final_labels = [op.label for op in ops]
    trace.final_parameters = [float(p) for p in params]
    return trace


# ---------------------------------------------------------------------------
# cross-trace accounting


def matched_record(trace: AdaptTrace, energy_error_target: float) -> LayerRecord:
    """Earliest record whose energy error is at or below the target."""
    for rec in trace.records:
        if rec.energy_error <= energy_error_target + 1e-12:
            return rec
    raise ValueError("trace never reaches the target energy accuracy")


def measurement_ratio(trace_adapt: AdaptTrace, trace_tetris: AdaptTrace) -> float:
    """Gradient-measurement count of the single-operator run at convergence
    over the batch run's count at matched energy accuracy."""
    if (
        trace_adapt.qubit_count != trace_tetris.qubit_count
        or trace_adapt.pool_size != trace_tetris.pool_size
        or trace_adapt.pool_kind != trace_tetris.pool_kind
    ):
        raise ValueError("traces come from different Hamiltonian/pool setups")
    if not trace_adapt.converged or not trace_tetris.converged:
        raise ValueError("measurement ratio needs converged traces")
    final = trace_adapt.records[-1]
    matched = matched_record(trace_tetris, final.energy_error)
    return final.measurements / matched.measurements


def depth_ratio(trace_adapt: AdaptTrace, trace_tetris: AdaptTrace) -> float:
    """Circuit-depth ratio at the single-operator run's convergence accuracy."""
    final = trace_adapt.records[-1]
    matched = matched_record(trace_tetris, final.energy_error)
    if matched.depth == 0:
        raise ValueError("matched record has an empty circuit")
    return final.depth / matched.depth


def reached_ground(trace: AdaptTrace) -> bool:
    """Exclusion rule: a run counts only if it actually hit the ground state."""
    if not trace.records:
        return False
    last = trace.records[-1]
    return last.infidelity < GROUND_INFIDELITY_TOL and abs(last.energy_error) < CHEMICAL_ACCURACY
