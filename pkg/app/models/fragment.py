"""Cut boundaries, cut candidates and the fragmentation tree."""
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from app.models.circuit import QuantumCircuit, WireCutPoint
from app.models.enums import InitState, Observable, PauliBasis


@dataclass(frozen=True)
class CutBoundarySpec:
    """Terminating bases of outgoing cut wires and preparations of incoming ones.

    Keys are fragment-local wire indices. A wire may carry both when it enters
    and leaves the fragment through cuts at different nesting levels.
    """
    measure_bases: Mapping[int, PauliBasis] = field(default_factory=dict)
    init_states: Mapping[int, InitState] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "measure_bases", dict(sorted(self.measure_bases.items())))
        object.__setattr__(self, "init_states", dict(sorted(self.init_states.items())))

    @property
    def is_empty(self) -> bool:
        return not self.measure_bases and not self.init_states

    def merged(self, other: "CutBoundarySpec") -> "CutBoundarySpec":
        return CutBoundarySpec(
            {**self.measure_bases, **other.measure_bases},
            {**self.init_states, **other.init_states},
        )

    def key(self) -> tuple:
        return (
            tuple((q, b.value) for q, b in self.measure_bases.items()),
            tuple((q, s.value) for q, s in self.init_states.items()),
        )


@dataclass(frozen=True)
class CutCandidate:
    """A set of wire cuts splitting a circuit into an upstream and a downstream fragment.

    ``upstream_map``/``downstream_map`` send original wires to fragment-local
    wires. ``cut_wires`` lists the original wires that are cut, in cut-point
    order; each appears as an outgoing wire upstream and an incoming wire downstream.
    """
    cut_points: tuple[WireCutPoint, ...]
    upstream: QuantumCircuit
    downstream: QuantumCircuit
    upstream_map: Mapping[int, int]
    downstream_map: Mapping[int, int]
    cut_wires: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.cut_points)

    @property
    def d(self) -> int:
        """Qubits sufficient to simulate the larger fragment, cut wires included."""
        return max(self.upstream.n_qubits, self.downstream.n_qubits)

    @property
    def upstream_qubits(self) -> tuple[int, ...]:
        return tuple(sorted(self.upstream_map))

    @property
    def downstream_qubits(self) -> tuple[int, ...]:
        return tuple(sorted(self.downstream_map))

    def label(self) -> str:
        """Qubit-set notation, e.g. ``{q0, q1, q2}; {q2, q3, q4}``."""
        up = ", ".join(f"q{q}" for q in self.upstream_qubits)
        down = ", ".join(f"q{q}" for q in self.downstream_qubits)
        return f"{{{up}}}; {{{down}}}"

    def partition_label(self) -> str:
        return f"({self.k},{self.d})-partitioned"


@dataclass(frozen=True)
class ScoredCut:
    """A candidate with the predicted errors of both fragments."""
    index: int
    candidate: CutCandidate
    e_p1: float
    e_p2: float

    @property
    def distance(self) -> float:
        return abs(self.e_p1 - self.e_p2)


@dataclass(frozen=True)
class FragmentNode:
    """Node of the fragmentation tree.

    Internal nodes hold the chosen cut and exactly two children (upstream,
    downstream). Leaves are below threshold or flagged unsplittable.
    """
    node_id: str
    circuit: QuantumCircuit
    predicted_error: float
    level: int
    cut: ScoredCut | None = None
    children: tuple["FragmentNode", ...] = ()
    unsplittable: bool = False
    reason: str | None = None

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def walk(self) -> Iterator["FragmentNode"]:
        yield self
        for child in self.children:
            yield from child.walk()

    def leaves(self) -> list["FragmentNode"]:
        return [node for node in self.walk() if node.is_leaf]


@dataclass(frozen=True)
class FragmentationTree:
    """Binary tree of recursive cuts; leaves are executed directly."""
    root: FragmentNode
    threshold: float
    max_cut: int
    max_depth: int

    def nodes(self) -> list[FragmentNode]:
        return list(self.root.walk())

    def leaves(self) -> list[FragmentNode]:
        return self.root.leaves()

    @property
    def height(self) -> int:
        return max(node.level for node in self.root.walk())


@dataclass(frozen=True)
class ReconstructionTerm:
    """One product term: per cut wire an init state and the observable whose signed marginal it weights."""
    inits: tuple[InitState, ...]
    observables: tuple[Observable, ...]
    coefficient: float


@dataclass(frozen=True)
class FragmentRunSet:
    """Outcomes of every boundary variant of one cut.

    ``upstream`` is keyed by the measurement bases of the cut wires,
    ``downstream`` by their init states. Values map bitstrings over the
    fragment's local wires to (quasi-)probabilities.
    """
    candidate: CutCandidate
    n_qubits: int
    upstream: Mapping[tuple[PauliBasis, ...], Mapping[str, float]]
    downstream: Mapping[tuple[InitState, ...], Mapping[str, float]]
    exact: bool = True

    @property
    def run_count(self) -> int:
        return len(self.upstream) + len(self.downstream)
