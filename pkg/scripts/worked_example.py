"""Walk through the stretched-H4 story with the qubit pool.

Shows the first selected operator and its optimal angle, the two-layer
stall of the single-operator variant at an excited eigenstate, and the
batch variant's first layer reaching four determinants at once.
"""

import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from adaptvqe.chem import jordan_wigner, parse_fcidump
from adaptvqe.engine import AdaptConfig, run
from adaptvqe.oracle import ground_state
from adaptvqe.pools import build_qubit_pool
from adaptvqe.statevec import Ansatz, count_determinants, fix_global_phase, prepare

FIXTURE = pathlib.Path(__file__).resolve().parent.parent / "fixtures" / "h4_3.0.fcidump"


def dominant(state, n=6):
    amps = fix_global_phase(state.amplitudes)
    order = np.argsort(-np.abs(amps))[:n]
    return " ".join(
        f"{amps[i].real:+.4f}|{format(i, f'0{state.qubit_count}b')}>"
        for i in order
        if abs(amps[i]) > 1e-4
    )


def main():
    from adaptvqe.statevec import StateVector

    h = jordan_wigner(parse_fcidump(FIXTURE.read_text()))
    truth = ground_state(h)
    pool = build_qubit_pool(h.qubit_count)
    hf = h.energy(StateVector.basis(h.hf_reference))
    print(f"H4 @ 3.0 A | HF {hf:.8f} Ha | FCI {truth.energy:.8f} Ha")

    for variant in ("adapt", "tetris"):
        trace = run(h, pool, AdaptConfig(pool_kind="qubit", variant=variant, max_layers=20), truth)
        print(f"\n== {variant}: {trace.reason} after {len(trace.records) - 1} layers")
        for rec in trace.records:
            print(
                f"  L{rec.layer:2d} E={rec.energy:+.6f} err={rec.energy_error:.2e} "
                f"infid={rec.infidelity:.2e} dets={rec.determinant_count} {';'.join(rec.labels)}"
            )
        ansatz = Ansatz(
            h.hf_reference,
            tuple(pool.by_label(l) for l in trace.final_labels),
            tuple(trace.final_parameters),
        )
        state = prepare(ansatz)
        print(f"  final state: {dominant(state)}")
        print(f"  determinants >= 1e-3: {count_determinants(state)}")


if __name__ == "__main__":
    main()
