"""
SimulatorService - exact statevector and noisy trajectory execution.

The noisy backend stands in for hardware: after every gate each touched wire
receives a uniformly random Pauli with probability p1 (1-qubit gates) or p2
(2- and 3-qubit gates), and every measured bit is flipped with probability p_ro.
Cut boundaries are realized as extra 1-qubit gates, so they are noisy too.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from app.config.settings import get_settings
from app.errors import BoundaryError, QubitLimitError, ShotsError
from app.models.circuit import Gate, QuantumCircuit
from app.models.distribution import OutcomeDistribution
from app.models.enums import BackendMode, GateKind, InitState, PauliBasis
from app.models.fragment import CutBoundarySpec
from app.schemas.simulation import NoiseModel
from app.services.gates import PAULIS, apply_unitary, gate_matrix

logger = logging.getLogger(__name__)

# |0> plus these gates prepares each init state
_PREPARE: dict[InitState, tuple[GateKind, ...]] = {
    InitState.ZERO: (),
    InitState.ONE: (GateKind.X,),
    InitState.PLUS: (GateKind.H,),
    InitState.PLUS_I: (GateKind.H, GateKind.S),
}

# Rotations taking each basis onto Z before readout
_ROTATE: dict[PauliBasis, tuple[GateKind, ...]] = {
    PauliBasis.Z: (),
    PauliBasis.X: (GateKind.H,),
    PauliBasis.Y: (GateKind.SDG, GateKind.H),
}


class SimulatorService:
    """Executes circuits, optionally under a cut boundary."""

    @staticmethod
    def check_width(circuit: QuantumCircuit) -> None:
        limit = get_settings().max_qubits
        if circuit.n_qubits > limit:
            raise QubitLimitError(
                f"{circuit.n_qubits} qubits exceed the simulation limit of {limit}"
            )

    @staticmethod
    def apply_boundary(
        circuit: QuantumCircuit, boundary: CutBoundarySpec | None
    ) -> QuantumCircuit:
        """
        Augment a circuit with state preparations and basis rotations.

        Args:
            circuit: Fragment circuit (pseudo-ops are dropped)
            boundary: Init states prepended and measurement rotations appended

        Returns:
            Plain gate circuit measured in the computational basis
        """
        if boundary is None or boundary.is_empty:
            return circuit.strip_pseudo()
        for q in (*boundary.measure_bases, *boundary.init_states):
            if not 0 <= q < circuit.n_qubits:
                raise BoundaryError(
                    f"boundary wire {q} is not a wire of a {circuit.n_qubits}-qubit circuit"
                )

        prep = [
            Gate(kind, (q,))
            for q, state in boundary.init_states.items()
            for kind in _PREPARE[state]
        ]
        rotate = [
            Gate(kind, (q,))
            for q, basis in boundary.measure_bases.items()
            for kind in _ROTATE[basis]
        ]
        return QuantumCircuit(
            circuit.n_qubits, (*prep, *circuit.operations, *rotate), circuit.name
        )

    @staticmethod
    def _probabilities(
        gates: tuple[Gate, ...],
        n_qubits: int,
        errors: dict[int, list[tuple[int, int]]] | None = None,
    ) -> np.ndarray:
        """Born probabilities of the final state; ``errors`` maps gate index to (wire, pauli)."""
        state = np.zeros([2] * n_qubits, dtype=complex)
        state[(0,) * n_qubits] = 1.0
        for i, gate in enumerate(gates):
            state = apply_unitary(state, gate_matrix(gate.kind, gate.params), gate.qubits)
            if errors and i in errors:
                for wire, pauli in errors[i]:
                    state = apply_unitary(state, PAULIS[pauli], (wire,))
        probs = np.abs(state.reshape(-1)) ** 2
        return probs / probs.sum()

    @staticmethod
    def simulate_ideal(
        circuit: QuantumCircuit, boundary: CutBoundarySpec | None = None
    ) -> OutcomeDistribution:
        """Exact joint distribution over every wire of the circuit."""
        SimulatorService.check_width(circuit)
        augmented = SimulatorService.apply_boundary(circuit, boundary)
        probs = SimulatorService._probabilities(augmented.gates, augmented.n_qubits)
        return OutcomeDistribution.from_vector(probs, circuit.n_qubits)

    @staticmethod
    def simulate_noisy(
        circuit: QuantumCircuit,
        noise: NoiseModel,
        shots: int,
        boundary: CutBoundarySpec | None = None,
        spawn_key: tuple[int, ...] = (),
    ) -> OutcomeDistribution:
        """
        Counts-normalized distribution from ``shots`` Pauli trajectories.

        Shots are drawn in blocks of ``trajectory_block_size``; every block
        has its own child seed of ``SeedSequence(noise.seed, spawn_key)``, so the
        result does not depend on the order blocks are evaluated in. Within a
        block, shots sharing an error pattern share one statevector run.
        """
        if shots < 1:
            raise ShotsError(f"shots must be >= 1, got {shots}")
        SimulatorService.check_width(circuit)
        augmented = SimulatorService.apply_boundary(circuit, boundary)
        n = augmented.n_qubits
        gates = augmented.gates

        # One noise slot per (gate, wire)
        slots = [
            (i, wire, noise.p1 if len(gate.qubits) == 1 else noise.p2)
            for i, gate in enumerate(gates)
            for wire in gate.qubits
        ]
        slot_p = np.array([p for _, _, p in slots], dtype=float)
        shifts = np.arange(n - 1, -1, -1, dtype=np.int64)

        block_size = get_settings().trajectory_block_size
        n_blocks = -(-shots // block_size)
        root = np.random.SeedSequence(entropy=noise.seed, spawn_key=tuple(spawn_key))
        cache: dict[bytes, np.ndarray] = {}
        counts = np.zeros(2 ** n, dtype=np.int64)

        for block, child in enumerate(root.spawn(n_blocks)):
            m = min(block_size, shots - block * block_size)
            rng = np.random.default_rng(child)
            fired = rng.random((m, len(slots))) < slot_p
            drawn = rng.integers(1, 4, size=(m, len(slots)))
            patterns = np.where(fired, drawn, 0).astype(np.int8)
            unique, inverse = np.unique(patterns, axis=0, return_inverse=True)
            inverse = np.asarray(inverse).reshape(-1)

            outcomes = np.empty(m, dtype=np.int64)
            for u, pattern in enumerate(unique):
                key = pattern.tobytes()
                if key not in cache:
                    errors: dict[int, list[tuple[int, int]]] = {}
                    for s in np.flatnonzero(pattern):
                        gate_index, wire, _ = slots[s]
                        errors.setdefault(gate_index, []).append((wire, int(pattern[s])))
                    cache[key] = SimulatorService._probabilities(gates, n, errors)
                members = np.flatnonzero(inverse == u)
                outcomes[members] = rng.choice(2 ** n, size=len(members), p=cache[key])

            if noise.p_ro > 0:
                flips = rng.random((m, n)) < noise.p_ro
                outcomes ^= (flips.astype(np.int64) << shifts).sum(axis=1)
            counts += np.bincount(outcomes, minlength=2 ** n)
            logger.debug(
                f"block {block}: {m} shots, {len(unique)} error patterns, "
                f"{len(cache)} cached"
            )

        return OutcomeDistribution.from_vector(counts / shots, n)

    @staticmethod
    def expectation_terms(
        circuit: QuantumCircuit,
        boundary: CutBoundarySpec,
        backend: "Backend",
        spawn_key: tuple[int, ...] = (),
    ) -> dict[tuple[str, str], float]:
        """
        Joint distribution split into (output bits, cut-wire bits).

        Output bits are the wires without a measurement basis, ascending; cut
        bits are the measured cut wires, ascending.
        """
        dist = backend.run(circuit, boundary, spawn_key)
        cuts = list(boundary.measure_bases)
        outputs = [q for q in range(circuit.n_qubits) if q not in boundary.measure_bases]
        return dist.split(outputs, cuts)


@dataclass(frozen=True)
class Backend:
    """Execution mode shared by the pipeline: exact, or noisy with a shot budget."""
    mode: BackendMode = BackendMode.EXACT
    shots: int = 128
    noise: NoiseModel = field(default_factory=NoiseModel)

    @classmethod
    def exact(cls) -> "Backend":
        return cls(BackendMode.EXACT)

    @classmethod
    def noisy(cls, shots: int, noise: NoiseModel | None = None) -> "Backend":
        return cls(BackendMode.NOISY_SHOTS, shots, noise or NoiseModel.default())

    @classmethod
    def from_settings(cls) -> "Backend":
        settings = get_settings()
        if settings.backend == BackendMode.EXACT.value:
            return cls.exact()
        return cls.noisy(settings.shots, NoiseModel.default())

    @property
    def is_exact(self) -> bool:
        return self.mode is BackendMode.EXACT

    def run(
        self,
        circuit: QuantumCircuit,
        boundary: CutBoundarySpec | None = None,
        spawn_key: tuple[int, ...] = (),
    ) -> OutcomeDistribution:
        if self.is_exact:
            return SimulatorService.simulate_ideal(circuit, boundary)
        return SimulatorService.simulate_noisy(
            circuit, self.noise, self.shots, boundary, spawn_key
        )


# Singleton instance
simulator_service = SimulatorService()


# Standalone function exports for convenience
def simulate_ideal(
    circuit: QuantumCircuit, boundary: CutBoundarySpec | None = None
) -> OutcomeDistribution:
    return SimulatorService.simulate_ideal(circuit, boundary)


def simulate_noisy(
    circuit: QuantumCircuit,
    noise: NoiseModel,
    shots: int,
    boundary: CutBoundarySpec | None = None,
    spawn_key: tuple[int, ...] = (),
) -> OutcomeDistribution:
    return SimulatorService.simulate_noisy(circuit, noise, shots, boundary, spawn_key)


def expectation_terms(
    circuit: QuantumCircuit,
    boundary: CutBoundarySpec,
    backend: Backend,
    spawn_key: tuple[int, ...] = (),
) -> dict[tuple[str, str], float]:
    return SimulatorService.expectation_terms(circuit, boundary, backend, spawn_key)
