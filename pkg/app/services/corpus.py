"""Circuit corpus helpers: QASM directories, seeded random circuits and named benchmarks."""
import logging
import math
from dataclasses import replace
from pathlib import Path
from typing import Sequence

import numpy as np

from app.errors import DatasetError
from app.models.circuit import Gate, QuantumCircuit
from app.models.enums import FEATURE_GATE_ORDER, GateKind
from app.parsing.qasm import parse_qasm

logger = logging.getLogger(__name__)

# Attempts before random_cuttable_circuit gives up
MAX_CUTTABLE_ATTEMPTS = 200


class CorpusService:
    """Builds the circuits datasets and benchmarks run on."""

    @staticmethod
    def load_corpus(directory: str | Path) -> list[QuantumCircuit]:
        """Parse every ``*.qasm`` file in a directory, sorted by file name."""
        path = Path(directory)
        if not path.is_dir():
            raise DatasetError(f"corpus directory not found: {path}")
        circuits = [
            parse_qasm(f.read_text(encoding="utf-8"), name=f.stem)
            for f in sorted(path.glob("*.qasm"))
        ]
        logger.info(f"Loaded {len(circuits)} circuits from {path}")
        return circuits

    @staticmethod
    def random_circuit(
        n_qubits: int,
        n_gates: int,
        seed: int | Sequence[int],
        kinds: Sequence[GateKind] | None = None,
    ) -> QuantumCircuit:
        """
        Seeded random circuit over the feature gate kinds.

        Args:
            n_qubits: Circuit width
            n_gates: Number of gates
            seed: Integer seed or seed sequence entropy
            kinds: Allowed kinds (defaults to all 17 that fit the width)

        Returns:
            QuantumCircuit named ``random-<n_qubits>q-<n_gates>g``
        """
        rng = np.random.default_rng(seed)
        pool = [k for k in (kinds or FEATURE_GATE_ORDER) if k.arity <= n_qubits]
        if not pool:
            raise DatasetError(f"no gate kind fits {n_qubits} qubit(s)")
        gates = []
        for _ in range(n_gates):
            kind = pool[int(rng.integers(len(pool)))]
            qubits = tuple(int(q) for q in rng.choice(n_qubits, size=kind.arity, replace=False))
            params = tuple(float(p) for p in rng.uniform(0.0, 2 * math.pi, size=kind.n_params))
            gates.append(Gate(kind, qubits, params))
        return QuantumCircuit(n_qubits, tuple(gates), f"random-{n_qubits}q-{n_gates}g")

    @staticmethod
    def random_cuttable_circuit(
        n_qubits: int,
        n_gates: int,
        seed: int | Sequence[int],
        max_cut: int = 2,
        kinds: Sequence[GateKind] | None = None,
    ) -> QuantumCircuit:
        """Random circuit that has at least one valid cut with at most ``max_cut`` wires."""
        from app.services.fragmentation import enumerate_cuts

        entropy = [seed] if isinstance(seed, int) else list(seed)
        for attempt in range(MAX_CUTTABLE_ATTEMPTS):
            circuit = CorpusService.random_circuit(n_qubits, n_gates, [*entropy, attempt], kinds)
            if enumerate_cuts(circuit, max_cut):
                return circuit
        raise DatasetError(
            f"no cuttable {n_qubits}-qubit circuit found in {MAX_CUTTABLE_ATTEMPTS} attempts"
        )

    @staticmethod
    def random_corpus(
        count: int,
        min_qubits: int,
        max_qubits: int,
        n_gates: int,
        seed: int,
        cuttable: bool = False,
        max_cut: int = 2,
    ) -> list[QuantumCircuit]:
        """
        ``count`` seeded random circuits with widths drawn from [min_qubits, max_qubits].

        Circuit i uses entropy [seed, i] and is named ``random-<i>-<n>q``.
        """
        if count < 1 or not 1 <= min_qubits <= max_qubits:
            raise DatasetError(
                f"invalid corpus request: {count} circuits of {min_qubits}..{max_qubits} qubits"
            )
        widths = np.random.default_rng(seed).integers(min_qubits, max_qubits + 1, size=count)
        circuits = []
        for i, n in enumerate(int(w) for w in widths):
            if cuttable:
                circuit = CorpusService.random_cuttable_circuit(n, n_gates, [seed, i], max_cut)
            else:
                circuit = CorpusService.random_circuit(n, n_gates, [seed, i])
            circuits.append(replace(circuit, name=f"random-{i:03d}-{n}q"))
        return circuits

    # ---- named benchmarks ----

    @staticmethod
    def bell() -> QuantumCircuit:
        return QuantumCircuit(
            2, (Gate(GateKind.H, (0,)), Gate(GateKind.CNOT, (0, 1))), "bell"
        )

    @staticmethod
    def ghz(n: int = 3) -> QuantumCircuit:
        gates = [Gate(GateKind.H, (0,))]
        gates += [Gate(GateKind.CNOT, (q, q + 1)) for q in range(n - 1)]
        return QuantumCircuit(n, tuple(gates), f"ghz-{n}")

    @staticmethod
    def bernstein_vazirani(n: int, secret: str | None = None) -> QuantumCircuit:
        """
        Bernstein-Vazirani over ``n`` wires: ``n - 1`` data wires and an ancilla last.

        The ideal output on the data wires is ``secret`` (all ones by default).
        """
        if n < 2:
            raise DatasetError("Bernstein-Vazirani needs at least 2 qubits")
        secret = secret if secret is not None else "1" * (n - 1)
        if len(secret) != n - 1 or set(secret) - {"0", "1"}:
            raise DatasetError(f"secret must be a {n - 1}-bit string, got '{secret}'")
        anc = n - 1
        gates = [Gate(GateKind.X, (anc,))]
        gates += [Gate(GateKind.H, (q,)) for q in range(n)]
        gates += [Gate(GateKind.CNOT, (q, anc)) for q, bit in enumerate(secret) if bit == "1"]
        gates += [Gate(GateKind.H, (q,)) for q in range(n - 1)]
        return QuantumCircuit(n, tuple(gates), f"bv-{n}")

    @staticmethod
    def shor5_like() -> QuantumCircuit:
        """Five-qubit circuit whose cut set contains {q0, q1, q2}; {q2, q3, q4}."""
        g = Gate
        gates = (
            g(GateKind.H, (0,)),
            g(GateKind.H, (1,)),
            g(GateKind.H, (2,)),
            g(GateKind.CNOT, (0, 2)),
            g(GateKind.CNOT, (1, 2)),
            g(GateKind.CNOT, (2, 3)),
            g(GateKind.CNOT, (2, 4)),
            g(GateKind.H, (0,)),
            g(GateKind.H, (1,)),
            g(GateKind.H, (3,)),
            g(GateKind.T, (4,)),
        )
        return QuantumCircuit(5, gates, "shor5-like")


# Singleton instance
corpus_service = CorpusService()


# Standalone function exports for convenience
def load_corpus(directory: str | Path) -> list[QuantumCircuit]:
    return CorpusService.load_corpus(directory)


def random_circuit(n_qubits, n_gates, seed, kinds=None) -> QuantumCircuit:
    return CorpusService.random_circuit(n_qubits, n_gates, seed, kinds)


def random_cuttable_circuit(n_qubits, n_gates, seed, max_cut=2, kinds=None) -> QuantumCircuit:
    return CorpusService.random_cuttable_circuit(n_qubits, n_gates, seed, max_cut, kinds)


bell = CorpusService.bell
ghz = CorpusService.ghz
bernstein_vazirani = CorpusService.bernstein_vazirani
shor5_like = CorpusService.shor5_like


def random_corpus(count, min_qubits, max_qubits, n_gates, seed, cuttable=False, max_cut=2):
    return CorpusService.random_corpus(count, min_qubits, max_qubits, n_gates, seed, cuttable, max_cut)
