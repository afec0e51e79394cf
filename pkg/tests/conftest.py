"""
Pytest configuration and shared fixtures for service tests.

Provides:
- Settings isolation (environment overrides cleared, cache reset)
- Named circuits (Bell, GHZ-3, a 4-qubit chain, the Shor-style 5-qubit circuit)
- Noise models
- Stub predictors and constant-prediction model documents
- A small synthetic dataset with a known label function
"""

import pytest

from app.config.settings import get_settings
from app.learn import LinearModel
from app.models.circuit import Gate, QuantumCircuit
from app.models.enums import FEATURE_COLUMNS, GateKind
from app.schemas.learn import DatasetRow, LinearParams
from app.schemas.simulation import NoiseModel
from app.services.corpus import bell, ghz, random_corpus, shor5_like
from app.services.features import extract_features
from app.services.training import TrainingService


@pytest.fixture(autouse=True)
def reset_settings(monkeypatch):
    """Every test starts from default settings."""
    for key in ("QFRAG_BACKEND", "QFRAG_MAX_QUBITS", "QFRAG_SHOTS", "QFRAG_SEED", "QFRAG_LOG_LEVEL"):
        monkeypatch.delenv(key, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


# ============== Circuits ==============

@pytest.fixture
def bell_circuit() -> QuantumCircuit:
    return bell()


@pytest.fixture
def ghz3() -> QuantumCircuit:
    return ghz(3)


@pytest.fixture
def chain4() -> QuantumCircuit:
    """Entangling chain with rotations on every wire; cuttable on q1 and q2."""
    g = Gate
    return QuantumCircuit(
        4,
        (
            g(GateKind.H, (0,)),
            g(GateKind.RY, (1,), (0.7,)),
            g(GateKind.CNOT, (0, 1)),
            g(GateKind.RX, (1,), (1.1,)),
            g(GateKind.CNOT, (1, 2)),
            g(GateKind.T, (2,)),
            g(GateKind.RZ, (3,), (0.4,)),
            g(GateKind.H, (3,)),
            g(GateKind.CZ, (2, 3)),
            g(GateKind.U3, (2,), (0.3, 0.2, 0.1)),
        ),
        "chain4",
    )


@pytest.fixture
def shor5() -> QuantumCircuit:
    return shor5_like()


# ============== Noise ==============

@pytest.fixture
def default_noise() -> NoiseModel:
    return NoiseModel(p1=0.002, p2=0.02, p_ro=0.03, seed=7)


@pytest.fixture
def noiseless() -> NoiseModel:
    return NoiseModel.noiseless(seed=7)


# ============== Predictors and models ==============

@pytest.fixture
def constant_predictor():
    """Factory: predictor returning the same error for every circuit."""
    def make(value: float):
        return lambda circuit: value
    return make


@pytest.fixture
def shor5_predictor():
    """Stub with the walk-through values: 59.210 for the root, 10.05 / 25.99 for fragments."""
    def predict(circuit: QuantumCircuit) -> float:
        name = circuit.name or ""
        if name.endswith("/up"):
            return 10.05
        if name.endswith("/down"):
            return 25.99
        return 59.210
    return predict


@pytest.fixture
def constant_model():
    """Factory: a linear model whose prediction is ``value`` for every circuit."""
    def make(value: float) -> LinearModel:
        params = LinearParams(weights=[0.0] * len(FEATURE_COLUMNS), intercept=value)
        return LinearModel.from_params(params)
    return make


@pytest.fixture
def constant_model_file(tmp_path, constant_model):
    """Factory: path of a persisted constant-prediction model."""
    def make(value: float, name: str = "model.json"):
        path = tmp_path / name
        path.write_text(TrainingService.dumps(constant_model(value)), encoding="utf-8")
        return path
    return make


# ============== Data ==============

@pytest.fixture
def synthetic_rows() -> list[DatasetRow]:
    """40 random-circuit feature rows labelled by a known smooth function."""
    rows = []
    for circuit in random_corpus(40, 2, 5, 15, seed=3):
        f = extract_features(circuit)
        label = 1.0 + 2.0 * f.n_qubits + 0.5 * f.depth + 3.0 * f.count(GateKind.CNOT)
        rows.append(DatasetRow(features=f.as_tuple(), label=label, name=circuit.name))
    return rows
