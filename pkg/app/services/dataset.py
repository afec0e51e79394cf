"""Training data: error-labelled feature rows, CSV I/O, splits and the shot sweep."""
import csv
import io
import logging
from pathlib import Path
from typing import Sequence

import numpy as np
from pydantic import ValidationError
from sklearn.model_selection import train_test_split as sk_train_test_split

from app.config.settings import get_settings
from app.errors import DatasetError
from app.models.circuit import QuantumCircuit
from app.models.enums import FEATURE_COLUMNS, LABEL_COLUMN
from app.schemas.learn import DatasetRow, ShotSweepResult
from app.schemas.simulation import NoiseModel
from app.services.features import extract_features
from app.services.metrics import mean_abs_error
from app.services.simulator import simulate_ideal, simulate_noisy

logger = logging.getLogger(__name__)


class DatasetService:
    """Builds and stores (features, E_mean) rows."""

    @staticmethod
    def label_circuit(
        circuit: QuantumCircuit,
        noise: NoiseModel,
        shots: int,
        spawn_key: tuple[int, ...] = (),
    ) -> float:
        """E_mean of the noisy execution against the ideal one."""
        ideal = simulate_ideal(circuit)
        noisy = simulate_noisy(circuit, noise, shots, spawn_key=spawn_key)
        return mean_abs_error(ideal, noisy)

    @staticmethod
    def build_dataset(
        corpus: Sequence[QuantumCircuit],
        noise: NoiseModel,
        shots: int | None = None,
    ) -> list[DatasetRow]:
        """
        Label every circuit of a corpus.

        Circuit i samples its trajectories from spawn key (i,), so rows do
        not depend on which other circuits share the corpus order before them.
        """
        if not corpus:
            raise DatasetError("cannot build a dataset from an empty corpus")
        shots = get_settings().shots if shots is None else shots
        rows = []
        for i, circuit in enumerate(corpus):
            label = DatasetService.label_circuit(circuit, noise, shots, (i,))
            rows.append(
                DatasetRow(
                    features=extract_features(circuit).as_tuple(),
                    label=label,
                    name=circuit.name,
                )
            )
        logger.info(f"Built {len(rows)} dataset rows at {shots} shots")
        return rows

    @staticmethod
    def to_matrix(rows: Sequence[DatasetRow]) -> tuple[np.ndarray, np.ndarray]:
        if not rows:
            raise DatasetError("no dataset rows")
        X = np.array([r.features for r in rows], dtype=float)
        y = np.array([r.label for r in rows], dtype=float)
        return X, y

    @staticmethod
    def train_test_split(
        rows: Sequence[DatasetRow], fraction: float = 0.8, seed: int = 7
    ) -> tuple[list[DatasetRow], list[DatasetRow]]:
        """Seeded shuffle, then the first ``floor(fraction * n)`` rows train."""
        if not 0 < fraction < 1:
            raise DatasetError(f"train fraction must be in (0, 1), got {fraction}")
        if len(rows) < 2:
            raise DatasetError(f"need at least 2 rows to split, got {len(rows)}")
        try:
            train, test = sk_train_test_split(
                list(rows), train_size=fraction, random_state=seed, shuffle=True
            )
        except ValueError as exc:
            raise DatasetError(f"cannot split {len(rows)} rows at {fraction}: {exc}") from exc
        return list(train), list(test)

    # ---- CSV ----

    @staticmethod
    def to_csv(rows: Sequence[DatasetRow]) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([*FEATURE_COLUMNS, LABEL_COLUMN])
        for row in rows:
            writer.writerow([*row.features, repr(float(row.label))])
        return buf.getvalue()

    @staticmethod
    def from_csv(text: str) -> list[DatasetRow]:
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        expected = [*FEATURE_COLUMNS, LABEL_COLUMN]
        if header is None or [h.strip() for h in header] != expected:
            raise DatasetError(f"dataset header must be {','.join(expected)}")
        rows = []
        for lineno, record in enumerate(reader, start=2):
            if not record:
                continue
            try:
                *features, label = record
                rows.append(
                    DatasetRow(
                        features=tuple(int(float(v)) for v in features),
                        label=float(label),
                    )
                )
            except (ValueError, ValidationError) as exc:
                raise DatasetError(f"dataset line {lineno}: {exc}") from exc
        if not rows:
            raise DatasetError("dataset has no rows")
        return rows

    @staticmethod
    def read_csv(path: str | Path) -> list[DatasetRow]:
        path = Path(path)
        if not path.is_file():
            raise DatasetError(f"dataset file not found: {path}")
        return DatasetService.from_csv(path.read_text(encoding="utf-8"))

    # ---- shot sweep ----

    @staticmethod
    def fit_shot_curve(
        exponents: Sequence[int], mean_errors: Sequence[float], degree: int | None = None
    ) -> ShotSweepResult:
        """
        Fit a polynomial of error against exponent and take its argmin over the tested exponents.

        A flat curve (all errors equal) picks the smallest exponent.
        """
        if not exponents:
            raise DatasetError("shot sweep needs at least one exponent")
        x = np.asarray(exponents, dtype=float)
        e = np.asarray(mean_errors, dtype=float)
        order = np.argsort(x, kind="stable")
        x, e = x[order], e[order]
        exps = [int(v) for v in x]

        if np.ptp(e) == 0 or len(x) == 1:
            return ShotSweepResult(
                best_exponent=exps[0], exponents=exps, mean_errors=e.tolist()
            )

        degree = get_settings().sweep_degree if degree is None else degree
        degree = min(degree, len(x) - 1)
        coefficients = np.polyfit(x, e, degree)
        fitted = np.polyval(coefficients, x)
        best = exps[int(np.argmin(fitted))]
        return ShotSweepResult(
            best_exponent=best,
            exponents=exps,
            mean_errors=e.tolist(),
            coefficients=coefficients.tolist(),
            fitted=fitted.tolist(),
        )

    @staticmethod
    def shots_sweep(
        corpus: Sequence[QuantumCircuit],
        noise: NoiseModel,
        exponents: Sequence[int] = tuple(range(1, 14)),
        degree: int | None = None,
    ) -> ShotSweepResult:
        """Mean E_mean over the corpus at 2^x shots for each exponent x, then fit."""
        if not corpus:
            raise DatasetError("shot sweep needs a non-empty corpus")
        means = []
        for x in exponents:
            errors = [
                DatasetService.label_circuit(c, noise, 2 ** int(x), (int(x), i))
                for i, c in enumerate(corpus)
            ]
            means.append(float(np.mean(errors)))
            logger.info(f"shots 2^{x}: mean error {means[-1]:.3f}%")
        return DatasetService.fit_shot_curve(exponents, means, degree)


# Singleton instance
dataset_service = DatasetService()


# Standalone function exports for convenience
def build_dataset(corpus, noise, shots=None) -> list[DatasetRow]:
    return DatasetService.build_dataset(corpus, noise, shots)


def train_test_split(rows, fraction=0.8, seed=7):
    return DatasetService.train_test_split(rows, fraction, seed)


def shots_sweep(corpus, noise, exponents=tuple(range(1, 14)), degree=None) -> ShotSweepResult:
    return DatasetService.shots_sweep(corpus, noise, exponents, degree)


def fit_shot_curve(exponents, mean_errors, degree=None) -> ShotSweepResult:
    return DatasetService.fit_shot_curve(exponents, mean_errors, degree)
