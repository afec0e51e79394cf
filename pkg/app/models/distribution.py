"""Outcome distributions over measurement bitstrings.

Bitstring character ``i`` is the outcome of wire ``i`` (q0 leftmost).
"""
import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from app.errors import MetricError

# Probabilities below this are dropped when converting from dense vectors
_DROP = 1e-15


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probability of each observed bitstring; absent keys have probability 0."""
    n_bits: int
    probs: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        clean: dict[str, float] = {}
        for key, p in self.probs.items():
            if len(key) != self.n_bits or set(key) - {"0", "1"}:
                raise MetricError(f"bitstring '{key}' does not have width {self.n_bits}")
            clean[key] = float(p)
        object.__setattr__(self, "probs", dict(sorted(clean.items())))

    # ---- construction ----

    @classmethod
    def from_vector(cls, vector: np.ndarray, n_bits: int) -> "OutcomeDistribution":
        """Dense vector indexed with wire 0 as the most significant bit."""
        vector = np.asarray(vector, dtype=float)
        idx = np.flatnonzero(np.abs(vector) > _DROP)
        return cls(n_bits, {format(int(i), f"0{n_bits}b") if n_bits else "": vector[i] for i in idx})

    @classmethod
    def from_counts(cls, counts: Mapping[str, int], n_bits: int) -> "OutcomeDistribution":
        total = sum(counts.values())
        if total <= 0:
            raise MetricError("cannot normalize empty counts")
        return cls(n_bits, {k: v / total for k, v in counts.items() if v})

    @classmethod
    def point(cls, bitstring: str) -> "OutcomeDistribution":
        return cls(len(bitstring), {bitstring: 1.0})

    # ---- views ----

    def __getitem__(self, key: str) -> float:
        return self.probs.get(key, 0.0)

    def support(self) -> set[str]:
        return {k for k, p in self.probs.items() if p != 0.0}

    def total(self) -> float:
        return float(sum(self.probs.values()))

    def is_normalized(self, tol: float = 1e-9) -> bool:
        return abs(self.total() - 1.0) <= tol and all(p >= -tol for p in self.probs.values())

    def to_vector(self) -> np.ndarray:
        vec = np.zeros(2 ** self.n_bits)
        for key, p in self.probs.items():
            vec[int(key, 2) if key else 0] = p
        return vec

    def normalized(self) -> "OutcomeDistribution":
        total = self.total()
        if total <= 0:
            raise MetricError("distribution has no positive mass")
        return OutcomeDistribution(self.n_bits, {k: p / total for k, p in self.probs.items()})

    def marginal(self, positions: Iterable[int]) -> "OutcomeDistribution":
        positions = list(positions)
        out: dict[str, float] = {}
        for key, p in self.probs.items():
            sub = "".join(key[i] for i in positions)
            out[sub] = out.get(sub, 0.0) + p
        return OutcomeDistribution(len(positions), out)

    def split(self, outputs: list[int], cuts: list[int]) -> dict[tuple[str, str], float]:
        """Joint map (output bits, cut bits) -> probability."""
        out: dict[tuple[str, str], float] = {}
        for key, p in self.probs.items():
            pair = ("".join(key[i] for i in outputs), "".join(key[i] for i in cuts))
            out[pair] = out.get(pair, 0.0) + p
        return out

    def total_variation(self, other: "OutcomeDistribution") -> float:
        if other.n_bits != self.n_bits:
            raise MetricError(f"width mismatch: {self.n_bits} vs {other.n_bits}")
        keys = set(self.probs) | set(other.probs)
        return 0.5 * sum(abs(self[k] - other[k]) for k in keys)

    # ---- serialization ----

    def to_csv(self, header_comment: str | None = None) -> str:
        buf = io.StringIO()
        if header_comment:
            buf.write(f"# {header_comment}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["bitstring", "probability"])
        for key, p in self.probs.items():
            writer.writerow([key, repr(p)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "OutcomeDistribution":
        rows = [line for line in text.splitlines() if line and not line.startswith("#")]
        reader = csv.DictReader(rows)
        probs = {row["bitstring"]: float(row["probability"]) for row in reader}
        if not probs:
            raise MetricError("empty distribution file")
        return cls(len(next(iter(probs))), probs)
