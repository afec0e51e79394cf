"""
PipelineService - end-to-end orchestration: predict, fragment, execute,
reconstruct and report.

Deterministic payloads (tree, distribution, report) are separated from
wall-clock timings so that two runs with the same configuration write
identical report sections.
"""

import csv
import io
import json
import logging
import os
import tempfile
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Callable, Sequence

from app.config.settings import get_settings
from app.learn import ErrorModel
from app.models.circuit import QuantumCircuit
from app.models.enums import BackendMode
from app.models.fragment import FragmentationTree
from app.parsing.qasm import load_qasm
from app.schemas.metrics import ErrorReport
from app.schemas.run import (
    BenchRow,
    BenchSummary,
    NodeReport,
    ReconstructionReport,
    RunConfig,
    RunOutput,
    RunReport,
)
from app.schemas.simulation import NoiseModel, load_noise_model
from app.services.fragmentation import FragmentationService
from app.services.metrics import error_report
from app.services.reconstruction import FoldResult, ReconstructionService
from app.services.simulator import Backend, simulate_ideal
from app.services.training import TrainingService

logger = logging.getLogger(__name__)

Predictor = Callable[[QuantumCircuit], float]

# Seed paths outside the tree's own (0, ...) / (1, ...) namespace
FULL_RUN_KEY = (2,)
LEAF_RUN_KEY = 3

# Below this E_mean the full-circuit error counts as zero and reduction is n/a
ZERO_ERROR = 1e-12


@contextmanager
def _timed(timings: dict[str, float], phase: str):
    start = time.perf_counter()
    try:
        yield
    finally:
        timings[phase] = round(time.perf_counter() - start, 6)


def write_atomic(path: Path, text: str) -> None:
    """Write a file via a temporary sibling and rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


class PipelineService:
    """Runs the full flow and the benchmark table."""

    @staticmethod
    def make_backend(mode: BackendMode | str, shots: int, noise: NoiseModel) -> Backend:
        """Backend carrying the configured shots and noise; exact mode ignores both."""
        return Backend(BackendMode(mode), shots, noise)

    @staticmethod
    def reduction_percent(full: ErrorReport | None, rebuilt: ErrorReport | None) -> float | None:
        """Relative E_mean reduction of the reconstruction; None when undefined."""
        if full is None or rebuilt is None or full.e_mean <= ZERO_ERROR:
            return None
        return 100.0 * (full.e_mean - rebuilt.e_mean) / full.e_mean

    @staticmethod
    def node_reports(tree: FragmentationTree, backend: Backend, measure_leaves: bool) -> list[NodeReport]:
        """One entry per node; leaves of a split tree also get a measured error."""
        reports = []
        leaf_index = 0
        for node in tree.nodes():
            measured = None
            if node.is_leaf and measure_leaves:
                outcome = backend.run(node.circuit, None, (LEAF_RUN_KEY, leaf_index))
                measured = error_report(simulate_ideal(node.circuit), outcome)
                leaf_index += 1
            reports.append(
                NodeReport(
                    id=node.node_id,
                    level=node.level,
                    n_qubits=node.circuit.n_qubits,
                    predicted_error=node.predicted_error,
                    is_leaf=node.is_leaf,
                    unsplittable=node.unsplittable,
                    cut_label=node.cut.candidate.label() if node.cut else None,
                    cut_points=[p.label() for p in node.cut.candidate.cut_points] if node.cut else [],
                    measured=measured,
                )
            )
        return reports

    @staticmethod
    def execute(
        circuit: QuantumCircuit,
        predictor: Predictor,
        backend: Backend,
        threshold: float,
        max_cut: int,
        max_depth: int,
        timings: dict[str, float] | None = None,
    ):
        """
        Fragment, fold and compare against a direct execution.

        Returns:
            (tree, fold result, full-circuit ErrorReport or None)
        """
        timings = {} if timings is None else timings
        circuit = circuit.strip_pseudo()
        with _timed(timings, "prediction"):
            predictor(circuit)
        with _timed(timings, "cut_finding"):
            tree = FragmentationService.fragment_recursively(
                circuit, predictor, threshold, max_cut, max_depth
            )
        with _timed(timings, "execution"):
            full = None
            if circuit.n_qubits <= get_settings().max_qubits:
                direct = backend.run(circuit, None, FULL_RUN_KEY)
                full = error_report(simulate_ideal(circuit), direct)
        with _timed(timings, "reconstruction"):
            folded = ReconstructionService.fold_tree(tree, backend)
        return tree, folded, full

    @staticmethod
    def run_circuit(
        circuit: QuantumCircuit,
        model: ErrorModel,
        backend: Backend,
        seed: int,
        threshold: float,
        max_cut: int,
        max_depth: int,
    ) -> tuple[RunOutput, FragmentationTree, FoldResult]:
        """Run the full flow in memory; nothing is written."""
        predictor = TrainingService.make_predictor(model)
        logger.info(
            f"Running {circuit.name} ({circuit.n_qubits} qubits) on {backend.mode.value} "
            f"with threshold {threshold}% and K={max_cut}"
        )
        timings: dict[str, float] = {}
        tree, folded, full = PipelineService.execute(
            circuit, predictor, backend, threshold, max_cut, max_depth, timings
        )
        report = RunReport(
            circuit=circuit.name or "circuit",
            n_qubits=circuit.n_qubits,
            backend=backend.mode,
            shots=backend.shots,
            seed=seed,
            threshold=threshold,
            max_cut=max_cut,
            noise=backend.noise,
            model_family=model.family,
            root_predicted_error=tree.root.predicted_error,
            nodes=PipelineService.node_reports(tree, backend, len(tree.leaves()) > 1),
            full_circuit=full,
            reconstructed=folded.reference,
            reduction_percent=PipelineService.reduction_percent(full, folded.reference),
            reconstruction=ReconstructionReport(
                exact=folded.exact,
                run_count=folded.run_count,
                clipped_mass=folded.clipped_mass,
                unsplittable_leaves=folded.unsplittable_leaves,
            ),
        )
        return RunOutput(report=report, timings=timings), tree, folded

    @staticmethod
    def run_pipeline(config: RunConfig) -> RunOutput:
        """
        Run one configuration and write its files.

        Writes ``<stem>.tree.json``, ``<stem>.distribution.csv`` and
        ``<stem>.report.json`` under ``config.out_dir``, plus a copy of the
        tree at ``config.plan_path`` when one is set.
        """
        circuit = load_qasm(config.circuit_path)
        model = TrainingService.load_model(config.model_path)
        noise = load_noise_model(config.noise_path) if config.noise_path else NoiseModel.default()
        noise = noise.with_seed(config.seed)
        backend = PipelineService.make_backend(config.backend, config.shots, noise)
        output, tree, folded = PipelineService.run_circuit(
            circuit, model, backend, config.seed, config.threshold, config.max_cut, config.max_depth
        )

        out_dir = Path(config.out_dir)
        stem = circuit.name
        files = {
            "tree": out_dir / f"{stem}.tree.json",
            "distribution": out_dir / f"{stem}.distribution.csv",
            "report": out_dir / f"{stem}.report.json",
        }
        if config.plan_path:
            files["plan"] = Path(config.plan_path)
        tree_json = FragmentationService.tree_to_json(tree)
        write_atomic(files["tree"], tree_json)
        if "plan" in files:
            write_atomic(files["plan"], tree_json)
        write_atomic(
            files["distribution"],
            folded.distribution.to_csv(
                f"{stem}: reconstructed distribution over {circuit.n_qubits} qubits; bit i is qubit i (q0 leftmost)"
            ),
        )
        output.files = {name: str(path) for name, path in files.items()}
        write_atomic(files["report"], PipelineService.report_json(output))
        logger.info(f"Wrote {', '.join(str(p) for p in files.values())}")
        return output

    @staticmethod
    def report_json(output: RunOutput) -> str:
        """Report and timings as separate top-level keys."""
        payload = {
            "report": json.loads(output.report.model_dump_json()),
            "timings": output.timings,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    # ---- benchmark ----

    @staticmethod
    def bench_report(
        corpus: Sequence[QuantumCircuit],
        predictor: Predictor,
        backend: Backend,
        threshold: float | None = None,
        max_cut: int | None = None,
        max_depth: int | None = None,
    ) -> BenchSummary:
        """Full-circuit vs reconstructed error for every circuit of a corpus."""
        settings = get_settings()
        threshold = settings.threshold if threshold is None else threshold
        max_cut = settings.max_cut if max_cut is None else max_cut
        max_depth = settings.max_fragment_depth if max_depth is None else max_depth

        rows = []
        for circuit in corpus:
            tree, folded, full = PipelineService.execute(
                circuit, predictor, backend, threshold, max_cut, max_depth
            )
            rebuilt = folded.reference
            if full is None or rebuilt is None:
                logger.warning(f"{circuit.name}: too wide for an ideal reference, skipped")
                continue
            rows.append(
                BenchRow(
                    circuit=circuit.name or "circuit",
                    n_qubits=circuit.n_qubits,
                    leaves=len(tree.leaves()),
                    full_error=full.e_mean,
                    reconstructed_error=rebuilt.e_mean,
                    full_fidelity=full.hellinger_fidelity,
                    reconstructed_fidelity=rebuilt.hellinger_fidelity,
                    reduction_percent=PipelineService.reduction_percent(full, rebuilt),
                )
            )
        reductions = [r.reduction_percent for r in rows if r.reduction_percent is not None]
        mean = sum(reductions) / len(reductions) if reductions else None
        if mean is not None:
            logger.info(f"Mean reduction over {len(reductions)} circuits: {mean:.3f}%")
        return BenchSummary(rows=rows, mean_reduction_percent=mean)

    @staticmethod
    def bench_csv(summary: BenchSummary) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(BenchRow.model_fields))
        for row in summary.rows:
            writer.writerow(
                ["n/a" if v is None else v for v in row.model_dump().values()]
            )
        return buf.getvalue()

    @staticmethod
    def bench_table(summary: BenchSummary) -> str:
        """Human-readable table: one line per circuit plus the mean reduction."""
        header = f"{'circuit':<24}{'qubits':>7}{'leaves':>7}{'full':>10}{'rebuilt':>10}{'F full':>9}{'F rebuilt':>11}{'reduction':>11}"
        lines = [header, "-" * len(header)]
        for r in summary.rows:
            reduction = "n/a" if r.reduction_percent is None else f"{r.reduction_percent:.3f}%"
            lines.append(
                f"{r.circuit:<24}{r.n_qubits:>7}{r.leaves:>7}{r.full_error:>10.3f}"
                f"{r.reconstructed_error:>10.3f}{r.full_fidelity:>9.3f}"
                f"{r.reconstructed_fidelity:>11.3f}{reduction:>11}"
            )
        mean = summary.mean_reduction_percent
        lines.append(f"mean reduction: {'n/a' if mean is None else f'{mean:.3f}%'}")
        return "\n".join(lines) + "\n"


# Singleton instance
pipeline_service = PipelineService()


# Standalone function exports for convenience
def run_pipeline(config: RunConfig) -> RunOutput:
    return PipelineService.run_pipeline(config)


def bench_report(corpus, predictor, backend, threshold=None, max_cut=None, max_depth=None) -> BenchSummary:
    return PipelineService.bench_report(corpus, predictor, backend, threshold, max_cut, max_depth)
