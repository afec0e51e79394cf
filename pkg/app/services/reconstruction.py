"""
ReconstructionService - recombines fragment outcomes into the full-circuit
distribution.

Each cut wire's state is expanded over the init states |0>, |1>, |+>, |+i>:

    w(|0>)  = (Tr I + Tr Z - Tr X - Tr Y) / 2
    w(|1>)  = (Tr I - Tr Z - Tr X - Tr Y) / 2
    w(|+>)  = Tr X
    w(|+i>) = Tr Y

where Tr O is the upstream signed marginal of the cut bit measured in O's
basis (I reuses the Z run, unsigned). Several cut wires multiply.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Mapping

from app.config.settings import get_settings
from app.errors import ReconstructionError
from app.models.circuit import QuantumCircuit
from app.models.distribution import OutcomeDistribution
from app.models.enums import InitState, Observable, PauliBasis
from app.models.fragment import (
    CutBoundarySpec,
    CutCandidate,
    FragmentationTree,
    FragmentNode,
    FragmentRunSet,
    ReconstructionTerm,
)
from app.schemas.metrics import ErrorReport
from app.schemas.run import CutStudyRow
from app.services.metrics import error_report, mean_abs_error
from app.services.simulator import Backend, simulate_ideal

logger = logging.getLogger(__name__)

# Per-wire expansion coefficients, by init state then observable
TERM_COEFFICIENTS: dict[InitState, dict[Observable, float]] = {
    InitState.ZERO: {Observable.I: 0.5, Observable.Z: 0.5, Observable.X: -0.5, Observable.Y: -0.5},
    InitState.ONE: {Observable.I: 0.5, Observable.Z: -0.5, Observable.X: -0.5, Observable.Y: -0.5},
    InitState.PLUS: {Observable.X: 1.0},
    InitState.PLUS_I: {Observable.Y: 1.0},
}

# Entries this small are numerical noise in exact mode
EXACT_DROP = 1e-12
NORMALIZATION_TOL = 1e-9

Evaluator = Callable[[int, CutBoundarySpec, tuple[int, ...]], Mapping[str, float]]


@dataclass
class FoldResult:
    """Root distribution of a folded tree with its bookkeeping."""
    distribution: OutcomeDistribution
    exact: bool
    run_count: int
    clipped_mass: float
    unsplittable_leaves: list[str] = field(default_factory=list)
    reference: ErrorReport | None = None


class ReconstructionService:
    """Term tables, fragment variant runs, combination and tree folding."""

    @staticmethod
    def build_term_table(n_cut_wires: int) -> list[ReconstructionTerm]:
        """
        Product expansion over ``n_cut_wires`` wires.

        Returns:
            One term per (init assignment, observable assignment) with a
            nonzero coefficient; 10 terms per wire, 10^n in total
        """
        if n_cut_wires < 1:
            raise ReconstructionError(f"need at least one cut wire, got {n_cut_wires}")
        table = []
        for inits in product(InitState, repeat=n_cut_wires):
            options = [tuple(TERM_COEFFICIENTS[v].items()) for v in inits]
            for combo in product(*options):
                coefficient = 1.0
                for _, c in combo:
                    coefficient *= c
                table.append(
                    ReconstructionTerm(inits, tuple(o for o, _ in combo), coefficient)
                )
        return table

    # ---- variant runs ----

    @staticmethod
    def _forward(
        candidate: CutCandidate, boundary: CutBoundarySpec
    ) -> tuple[CutBoundarySpec, CutBoundarySpec]:
        """
        Split a node boundary between its fragments.

        Inits go to the fragment holding the wire's first gate (upstream when
        present there); bases go to the one holding its last gate.
        """
        up, down = candidate.upstream_map, candidate.downstream_map
        up_meas, down_meas, up_init, down_init = {}, {}, {}, {}
        for q, basis in boundary.measure_bases.items():
            if q in down:
                down_meas[down[q]] = basis
            elif q in up:
                up_meas[up[q]] = basis
            else:
                raise ReconstructionError(f"boundary wire {q} has no gates in either fragment")
        for q, state in boundary.init_states.items():
            if q in up:
                up_init[up[q]] = state
            elif q in down:
                down_init[down[q]] = state
            else:
                raise ReconstructionError(f"boundary wire {q} has no gates in either fragment")
        return CutBoundarySpec(up_meas, up_init), CutBoundarySpec(down_meas, down_init)

    @staticmethod
    def execute_fragment_runs(
        candidate: CutCandidate,
        backend: Backend,
        n_qubits: int | None = None,
        boundary: CutBoundarySpec | None = None,
        evaluator: Evaluator | None = None,
        spawn_key: tuple[int, ...] = (),
    ) -> FragmentRunSet:
        """
        Run 3^k upstream basis variants and 4^k downstream init variants.

        Args:
            candidate: The cut
            backend: Execution backend
            n_qubits: Width of the circuit that was cut (defaults to the
                highest wire either fragment touches, plus one)
            boundary: Boundary of the cut circuit itself, forwarded to the fragments
            evaluator: (child index, boundary, spawn key) -> outcomes; defaults
                to running the fragment circuits on ``backend``
            spawn_key: Seed path of this cut; variants extend it

        Returns:
            FragmentRunSet with every variant
        """
        if n_qubits is None:
            n_qubits = 1 + max([*candidate.upstream_map, *candidate.downstream_map])
        boundary = boundary or CutBoundarySpec()
        up_base, down_base = ReconstructionService._forward(candidate, boundary)
        cu = [candidate.upstream_map[w] for w in candidate.cut_wires]
        cd = [candidate.downstream_map[w] for w in candidate.cut_wires]
        k = len(cu)

        if evaluator is None:
            fragments = (candidate.upstream, candidate.downstream)

            def evaluator(child: int, b: CutBoundarySpec, key: tuple[int, ...]):
                return backend.run(fragments[child], b, key).probs

        upstream = {}
        for i, bases in enumerate(product((PauliBasis.X, PauliBasis.Y, PauliBasis.Z), repeat=k)):
            b = up_base.merged(CutBoundarySpec(dict(zip(cu, bases))))
            upstream[bases] = dict(evaluator(0, b, (*spawn_key, 0, i)))
        downstream = {}
        for i, inits in enumerate(product(InitState, repeat=k)):
            b = down_base.merged(CutBoundarySpec(init_states=dict(zip(cd, inits))))
            downstream[inits] = dict(evaluator(1, b, (*spawn_key, 1, i)))
        return FragmentRunSet(candidate, n_qubits, upstream, downstream, backend.is_exact)

    # ---- combination ----

    @staticmethod
    def combine_raw(
        runs: FragmentRunSet, table: list[ReconstructionTerm] | None = None
    ) -> dict[str, float]:
        """Unnormalized quasi-distribution over the cut circuit's wires (idle wires read 0)."""
        cand = runs.candidate
        k = cand.k
        table = table or ReconstructionService.build_term_table(k)
        cu = [cand.upstream_map[w] for w in cand.cut_wires]
        n_up = cand.upstream.n_qubits
        up_rest = [l for l in range(n_up) if l not in cu]

        expected_up = set(product((PauliBasis.X, PauliBasis.Y, PauliBasis.Z), repeat=k))
        expected_down = set(product(InitState, repeat=k))
        if set(runs.upstream) != expected_up or set(runs.downstream) != expected_down:
            raise ReconstructionError("incomplete fragment run set")

        # Signed marginals T[observables][rest bits]
        marginals: dict[tuple[Observable, ...], dict[str, float]] = defaultdict(
            lambda: defaultdict(float)
        )
        for bases, outcomes in runs.upstream.items():
            options = [
                (Observable.I, Observable.Z) if b is PauliBasis.Z else (Observable(b.value),)
                for b in bases
            ]
            assignments = list(product(*options))
            for key, p in outcomes.items():
                if len(key) != n_up:
                    raise ReconstructionError(
                        f"upstream outcome '{key}' does not match {n_up} fragment wires"
                    )
                rest = "".join(key[l] for l in up_rest)
                bits = [key[l] for l in cu]
                for observables in assignments:
                    sign = 1.0
                    for o, bit in zip(observables, bits):
                        if o is not Observable.I and bit == "1":
                            sign = -sign
                    marginals[observables][rest] += sign * p

        # Init-state weights W[inits][rest bits]
        weights: dict[tuple[InitState, ...], dict[str, float]] = defaultdict(
            lambda: defaultdict(float)
        )
        for term in table:
            source = marginals.get(term.observables)
            if not source:
                continue
            target = weights[term.inits]
            for rest, t in source.items():
                target[rest] += term.coefficient * t

        # Where each output wire reads its bit from
        rest_index = {l: i for i, l in enumerate(up_rest)}
        sources: list[tuple[str, int]] = []
        for q in range(runs.n_qubits):
            if q in cand.downstream_map:
                sources.append(("down", cand.downstream_map[q]))
            elif q in cand.upstream_map:
                sources.append(("up", rest_index[cand.upstream_map[q]]))
            else:
                sources.append(("idle", 0))

        out: dict[str, float] = defaultdict(float)
        n_down = cand.downstream.n_qubits
        for inits, w_by_rest in weights.items():
            down_outcomes = runs.downstream[inits]
            for rest, w in w_by_rest.items():
                if w == 0.0:
                    continue
                for sd, r in down_outcomes.items():
                    if len(sd) != n_down:
                        raise ReconstructionError(
                            f"downstream outcome '{sd}' does not match {n_down} fragment wires"
                        )
                    key = "".join(
                        sd[i] if side == "down" else rest[i] if side == "up" else "0"
                        for side, i in sources
                    )
                    out[key] += w * r
        return dict(out)

    @staticmethod
    def finalize(
        raw: Mapping[str, float], n_bits: int, exact: bool
    ) -> tuple[OutcomeDistribution, float]:
        """
        Turn a quasi-distribution into a distribution.

        Negative entries are clipped to 0 and their mass reported; the result
        is renormalized when its total is off by more than 1e-9.
        """
        drop = EXACT_DROP if exact else 0.0
        clipped = -sum(p for p in raw.values() if p < -drop)
        probs = {k: p for k, p in raw.items() if p > drop}
        total = sum(probs.values())
        if total <= 0:
            raise ReconstructionError("reconstruction has no positive mass")
        if abs(total - 1.0) > NORMALIZATION_TOL:
            probs = {k: p / total for k, p in probs.items()}
        if exact and clipped > NORMALIZATION_TOL:
            logger.warning(f"exact reconstruction clipped {clipped:.3e} negative mass")
        elif clipped > 0:
            logger.debug(f"clipped {clipped:.3e} negative mass")
        return OutcomeDistribution(n_bits, probs), clipped

    @staticmethod
    def combine(
        runs: FragmentRunSet, table: list[ReconstructionTerm] | None = None
    ) -> OutcomeDistribution:
        """Reconstructed distribution over the cut circuit's wires."""
        raw = ReconstructionService.combine_raw(runs, table)
        dist, _ = ReconstructionService.finalize(raw, runs.n_qubits, runs.exact)
        return dist

    # ---- tree folding ----

    @staticmethod
    def evaluate_node(
        node: FragmentNode,
        boundary: CutBoundarySpec,
        backend: Backend,
        spawn_key: tuple[int, ...] = (),
        counter: list[int] | None = None,
    ) -> dict[str, float]:
        """Outcomes of a node's circuit under a boundary, recursing through its cut."""
        if node.is_leaf:
            if counter is not None:
                counter[0] += 1
            return dict(backend.run(node.circuit, boundary, spawn_key).probs)

        def evaluator(child: int, b: CutBoundarySpec, key: tuple[int, ...]):
            return ReconstructionService.evaluate_node(node.children[child], b, backend, key, counter)

        runs = ReconstructionService.execute_fragment_runs(
            node.cut.candidate,
            backend,
            node.circuit.n_qubits,
            boundary,
            evaluator,
            spawn_key,
        )
        return ReconstructionService.combine_raw(runs)

    @staticmethod
    def fold_tree(
        tree: FragmentationTree, backend: Backend, with_reference: bool = True
    ) -> FoldResult:
        """
        Execute the leaves and recombine bottom-up to the root distribution.

        Inner nodes stay unnormalized quasi-distributions; only the root is
        clipped and renormalized. The ideal reference is computed when the
        root fits the simulator.
        """
        root = tree.root
        unsplittable = [leaf.node_id for leaf in tree.leaves() if leaf.unsplittable]
        for node_id in unsplittable:
            logger.warning(f"{node_id} is above threshold and runs unsplit")

        counter = [0]
        raw = ReconstructionService.evaluate_node(root, CutBoundarySpec(), backend, (), counter)
        dist, clipped = ReconstructionService.finalize(raw, root.circuit.n_qubits, backend.is_exact)

        reference = None
        if with_reference and root.circuit.n_qubits <= get_settings().max_qubits:
            reference = error_report(simulate_ideal(root.circuit), dist)
        logger.info(
            f"Folded {len(tree.leaves())} leaves with {counter[0]} executions, "
            f"clipped mass {clipped:.3e}"
        )
        return FoldResult(dist, backend.is_exact, counter[0], clipped, unsplittable, reference)

    # ---- cut study ----

    @staticmethod
    def reconstruct_with_cut(
        circuit: QuantumCircuit, candidate: CutCandidate, backend: Backend
    ) -> OutcomeDistribution:
        runs = ReconstructionService.execute_fragment_runs(candidate, backend, circuit.n_qubits)
        return ReconstructionService.combine(runs)

    @staticmethod
    def cut_study(
        circuit: QuantumCircuit,
        predictor: Callable[[QuantumCircuit], float],
        max_cut: int,
        backend: Backend,
    ) -> list[CutStudyRow]:
        """
        Evaluate every candidate: predicted fragment errors, measured fragment
        errors and the error after reconstruction, all against ideal outputs.
        """
        from app.services.fragmentation import FragmentationService

        circuit = circuit.strip_pseudo()
        candidates = FragmentationService.enumerate_cuts(circuit, max_cut)
        if not candidates:
            return []
        scored = FragmentationService.score_cuts(candidates, predictor)
        chosen = FragmentationService.argmin_distance([(s.e_p1, s.e_p2) for s in scored])
        ideal = simulate_ideal(circuit)

        rows = []
        for s in scored:
            cand = s.candidate
            measured = [
                mean_abs_error(simulate_ideal(f), backend.run(f, None, (s.index, side)))
                for side, f in enumerate((cand.upstream, cand.downstream))
            ]
            rebuilt = ReconstructionService.reconstruct_with_cut(circuit, cand, backend)
            rows.append(
                CutStudyRow(
                    index=s.index,
                    label=cand.label(),
                    cut_points=[p.label() for p in cand.cut_points],
                    k=cand.k,
                    d=cand.d,
                    e_p1=s.e_p1,
                    e_p2=s.e_p2,
                    distance=s.distance,
                    measured_p1=measured[0],
                    measured_p2=measured[1],
                    reconstructed_error=mean_abs_error(ideal, rebuilt),
                    selected=s.index == chosen,
                )
            )
        return rows


# Singleton instance
reconstruction_service = ReconstructionService()


# Standalone function exports for convenience
def build_term_table(n_cut_wires: int) -> list[ReconstructionTerm]:
    return ReconstructionService.build_term_table(n_cut_wires)


def execute_fragment_runs(candidate, backend, n_qubits=None, boundary=None) -> FragmentRunSet:
    return ReconstructionService.execute_fragment_runs(candidate, backend, n_qubits, boundary)


def combine(runs: FragmentRunSet, table=None) -> OutcomeDistribution:
    return ReconstructionService.combine(runs, table)


def fold_tree(tree: FragmentationTree, backend: Backend, with_reference: bool = True) -> FoldResult:
    return ReconstructionService.fold_tree(tree, backend, with_reference)


def cut_study(circuit, predictor, max_cut, backend) -> list[CutStudyRow]:
    return ReconstructionService.cut_study(circuit, predictor, max_cut, backend)
