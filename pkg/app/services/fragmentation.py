"""
FragmentationService - cut enumeration, error-balanced cut selection and the
recursive fragmentation tree.

Cuts live on the gate DAG: one node per operation, one edge per wire segment
between consecutive operations on that wire. A cut point (q, g) removes the
segment leaving gate g on wire q. Gate indices refer to the circuit with
MEASURE/BARRIER removed.
"""

import json
import logging
from itertools import combinations
from typing import Callable, Sequence

from networkx import MultiDiGraph, weakly_connected_components

from app.config.settings import get_settings
from app.errors import FragmentationError
from app.models.circuit import QuantumCircuit, WireCutPoint
from app.models.fragment import CutCandidate, FragmentationTree, FragmentNode, ScoredCut
from app.parsing.qasm import emit_qasm, parse_qasm
from app.services.features import enumerate_wire_cut_positions

logger = logging.getLogger(__name__)

Predictor = Callable[[QuantumCircuit], float]


class FragmentationService:
    """Finds and applies binary wire cuts."""

    # ---- gate DAG ----

    @staticmethod
    def gate_graph(circuit: QuantumCircuit) -> MultiDiGraph:
        """Operations as nodes, wire segments as edges keyed by wire."""
        graph = MultiDiGraph()
        graph.add_nodes_from(range(len(circuit.gates)))
        for q in range(circuit.n_qubits):
            wire = circuit.wire_gates(q)
            for a, b in zip(wire, wire[1:]):
                graph.add_edge(a, b, key=q)
        return graph

    @staticmethod
    def _next_on_wire(circuit: QuantumCircuit, point: WireCutPoint) -> int:
        wire = circuit.wire_gates(point.qubit)
        return wire[wire.index(point.position) + 1]

    @staticmethod
    def _fragment(
        circuit: QuantumCircuit, indices: list[int], suffix: str
    ) -> tuple[QuantumCircuit, dict[int, int]]:
        gates = [circuit.gates[i] for i in sorted(indices)]
        wires = sorted({q for g in gates for q in g.qubits})
        wire_map = {q: local for local, q in enumerate(wires)}
        name = f"{circuit.name or 'circuit'}/{suffix}"
        fragment = QuantumCircuit(len(wires), tuple(g.remap(wire_map) for g in gates), name)
        return fragment, wire_map

    @staticmethod
    def try_cut(
        circuit: QuantumCircuit,
        cut_points: Sequence[WireCutPoint],
        graph: MultiDiGraph | None = None,
    ) -> CutCandidate | None:
        """
        Materialize a cut, or return None when it does not yield exactly two
        fragments with every cut wire running upstream to downstream.
        """
        circuit = circuit.strip_pseudo()
        graph = graph if graph is not None else FragmentationService.gate_graph(circuit)
        cut_graph = graph.copy()
        edges = []
        for point in cut_points:
            head = FragmentationService._next_on_wire(circuit, point)
            cut_graph.remove_edge(point.position, head, key=point.qubit)
            edges.append((point.position, head))

        components = list(weakly_connected_components(cut_graph))
        if len(components) != 2:
            return None
        upstream = next(c for c in components if edges[0][0] in c)
        downstream = next(c for c in components if c is not upstream)
        if any(a not in upstream or b not in downstream for a, b in edges):
            return None

        up_circuit, up_map = FragmentationService._fragment(circuit, list(upstream), "up")
        down_circuit, down_map = FragmentationService._fragment(circuit, list(downstream), "down")
        return CutCandidate(
            cut_points=tuple(cut_points),
            upstream=up_circuit,
            downstream=down_circuit,
            upstream_map=up_map,
            downstream_map=down_map,
            cut_wires=tuple(p.qubit for p in cut_points),
        )

    @staticmethod
    def enumerate_cuts(circuit: QuantumCircuit, max_cut: int) -> list[CutCandidate]:
        """
        Every valid cut of 1..max_cut wire segments, lexicographic by cut points.

        Circuits whose gate DAG is already disconnected have no valid cut.
        """
        if max_cut < 1:
            raise FragmentationError(f"max_cut must be >= 1, got {max_cut}")
        circuit = circuit.strip_pseudo()
        graph = FragmentationService.gate_graph(circuit)
        positions = enumerate_wire_cut_positions(circuit)
        candidates = []
        for k in range(1, max_cut + 1):
            for points in combinations(positions, k):
                # Two cuts on one wire always make the wire run both ways
                if len({p.qubit for p in points}) < k:
                    continue
                candidate = FragmentationService.try_cut(circuit, points, graph)
                if candidate is not None:
                    candidates.append(candidate)
        candidates.sort(key=lambda c: c.cut_points)
        logger.debug(
            f"{circuit.name}: {len(candidates)} valid cuts among {len(positions)} positions"
        )
        return candidates

    # ---- selection ----

    @staticmethod
    def argmin_distance(pairs: Sequence[tuple[float, float]]) -> int:
        """
        Index of the pair with the smallest |e1 - e2|.

        Ties go to the lower max(e1, e2), then to the lower index.
        """
        if not pairs:
            raise FragmentationError("no candidates to choose from")
        return min(
            range(len(pairs)),
            key=lambda i: (abs(pairs[i][0] - pairs[i][1]), max(pairs[i]), i),
        )

    @staticmethod
    def score_cuts(candidates: Sequence[CutCandidate], predictor: Predictor) -> list[ScoredCut]:
        return [
            ScoredCut(i, c, predictor(c.upstream), predictor(c.downstream))
            for i, c in enumerate(candidates)
        ]

    @staticmethod
    def select_cut(candidates: Sequence[CutCandidate], predictor: Predictor) -> int:
        """Index of the candidate whose fragments have the closest predicted errors."""
        scored = FragmentationService.score_cuts(candidates, predictor)
        return FragmentationService.argmin_distance([(s.e_p1, s.e_p2) for s in scored])

    # ---- recursion ----

    @staticmethod
    def fragment_recursively(
        circuit: QuantumCircuit,
        predictor: Predictor,
        threshold: float | None = None,
        max_cut: int | None = None,
        max_depth: int | None = None,
    ) -> FragmentationTree:
        """
        Split until every leaf's predicted error is at most ``threshold``.

        Args:
            circuit: Circuit to fragment
            predictor: Circuit -> predicted error percent
            threshold: Error percent in (0, 100]
            max_cut: Cut-size budget K
            max_depth: Deepest level a node may be split at

        Returns:
            FragmentationTree; leaves above threshold carry ``unsplittable``
        """
        settings = get_settings()
        threshold = settings.threshold if threshold is None else threshold
        max_cut = settings.max_cut if max_cut is None else max_cut
        max_depth = settings.max_fragment_depth if max_depth is None else max_depth
        if not 0 < threshold <= 100:
            raise FragmentationError(f"threshold must be in (0, 100], got {threshold}")

        def build(node_circuit: QuantumCircuit, node_id: str, level: int) -> FragmentNode:
            predicted = predictor(node_circuit)
            if predicted <= threshold:
                return FragmentNode(node_id, node_circuit, predicted, level)
            if level >= max_depth:
                logger.warning(f"{node_id}: predicted {predicted:.2f}% at max depth {max_depth}")
                return FragmentNode(
                    node_id, node_circuit, predicted, level,
                    unsplittable=True, reason="max depth reached",
                )
            candidates = FragmentationService.enumerate_cuts(node_circuit, max_cut)
            if not candidates:
                logger.warning(f"{node_id}: predicted {predicted:.2f}% but no valid cut")
                return FragmentNode(
                    node_id, node_circuit, predicted, level,
                    unsplittable=True, reason="no valid cut",
                )
            scored = FragmentationService.score_cuts(candidates, predictor)
            chosen = scored[
                FragmentationService.argmin_distance([(s.e_p1, s.e_p2) for s in scored])
            ]
            logger.info(
                f"{node_id}: {predicted:.2f}% > {threshold}%, cut "
                f"{chosen.candidate.label()} ({chosen.e_p1:.2f} / {chosen.e_p2:.2f})"
            )
            children = (
                build(chosen.candidate.upstream, f"{node_id}.0", level + 1),
                build(chosen.candidate.downstream, f"{node_id}.1", level + 1),
            )
            return FragmentNode(node_id, node_circuit, predicted, level, chosen, children)

        root = build(circuit.strip_pseudo(), "root", 0)
        return FragmentationTree(root, threshold, max_cut, max_depth)

    # ---- reporting ----

    @staticmethod
    def tree_summary(tree: FragmentationTree) -> dict:
        leaves = tree.leaves()
        return {
            "nodes": len(tree.nodes()),
            "leaves": len(leaves),
            "height": tree.height,
            "unsplittable": sum(1 for leaf in leaves if leaf.unsplittable),
            "leaf_details": [
                {
                    "id": leaf.node_id,
                    "n_qubits": leaf.circuit.n_qubits,
                    "level": leaf.level,
                    "predicted_error": leaf.predicted_error,
                    "unsplittable": leaf.unsplittable,
                }
                for leaf in leaves
            ],
        }

    @staticmethod
    def node_to_dict(node: FragmentNode) -> dict:
        data = {
            "id": node.node_id,
            "level": node.level,
            "n_qubits": node.circuit.n_qubits,
            "predicted_error": node.predicted_error,
            "qasm": emit_qasm(node.circuit),
            "unsplittable": node.unsplittable,
            "reason": node.reason,
        }
        if node.cut is not None:
            cand = node.cut.candidate
            data["cut"] = {
                "index": node.cut.index,
                "points": [[p.qubit, p.position] for p in cand.cut_points],
                "label": cand.label(),
                "k": cand.k,
                "d": cand.d,
                "e_p1": node.cut.e_p1,
                "e_p2": node.cut.e_p2,
                "distance": node.cut.distance,
                "upstream_map": [[q, l] for q, l in cand.upstream_map.items()],
                "downstream_map": [[q, l] for q, l in cand.downstream_map.items()],
            }
            data["children"] = [FragmentationService.node_to_dict(c) for c in node.children]
        return data

    @staticmethod
    def node_from_dict(data: dict) -> FragmentNode:
        circuit = parse_qasm(data["qasm"], name=data["id"])
        children = tuple(FragmentationService.node_from_dict(c) for c in data.get("children", []))
        cut = None
        if "cut" in data:
            c = data["cut"]
            candidate = CutCandidate(
                cut_points=tuple(WireCutPoint(q, g) for q, g in c["points"]),
                upstream=children[0].circuit,
                downstream=children[1].circuit,
                upstream_map={q: l for q, l in c["upstream_map"]},
                downstream_map={q: l for q, l in c["downstream_map"]},
                cut_wires=tuple(q for q, _ in c["points"]),
            )
            cut = ScoredCut(c["index"], candidate, c["e_p1"], c["e_p2"])
        return FragmentNode(
            data["id"], circuit, data["predicted_error"], data["level"],
            cut, children, data.get("unsplittable", False), data.get("reason"),
        )

    @staticmethod
    def tree_to_json(tree: FragmentationTree) -> str:
        return json.dumps(
            {
                "threshold": tree.threshold,
                "max_cut": tree.max_cut,
                "max_depth": tree.max_depth,
                "summary": FragmentationService.tree_summary(tree),
                "root": FragmentationService.node_to_dict(tree.root),
            },
            indent=2,
        ) + "\n"

    @staticmethod
    def tree_from_json(text: str) -> FragmentationTree:
        try:
            data = json.loads(text)
            return FragmentationTree(
                FragmentationService.node_from_dict(data["root"]),
                data["threshold"],
                data["max_cut"],
                data["max_depth"],
            )
        except (KeyError, IndexError, TypeError, json.JSONDecodeError) as exc:
            raise FragmentationError(f"invalid fragmentation tree document: {exc}") from exc


# Singleton instance
fragmentation_service = FragmentationService()


# Standalone function exports for convenience
def enumerate_cuts(circuit: QuantumCircuit, max_cut: int) -> list[CutCandidate]:
    return FragmentationService.enumerate_cuts(circuit, max_cut)


def select_cut(candidates: Sequence[CutCandidate], predictor: Predictor) -> int:
    return FragmentationService.select_cut(candidates, predictor)


def fragment_recursively(circuit, predictor, threshold=None, max_cut=None, max_depth=None):
    return FragmentationService.fragment_recursively(
        circuit, predictor, threshold, max_cut, max_depth
    )
