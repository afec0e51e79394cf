"""
Unit tests for MetricsService.

Tests the distribution error metrics and the regression scorecard.
"""

import numpy as np
import pytest

from app.errors import MetricError
from app.models.distribution import OutcomeDistribution
from app.services.metrics import (
    error_report,
    hellinger_distance,
    hellinger_fidelity,
    mean_abs_error,
    model_scorecard,
    r_squared,
    rms_error,
)

BELL = OutcomeDistribution(2, {"00": 0.5, "11": 0.5})
UNIFORM = OutcomeDistribution(2, {k: 0.25 for k in ("00", "01", "10", "11")})


def test_identical_distributions_have_zero_error():
    """Test the identity case of every metric."""
    assert mean_abs_error(BELL, BELL) == 0.0
    assert rms_error(BELL, BELL) == 0.0
    assert hellinger_distance(BELL, BELL) == pytest.approx(0.0)
    assert hellinger_fidelity(BELL, BELL) == pytest.approx(1.0)


def test_mean_error_percent_scale():
    """Test E_mean over the union of supports and over marked states."""
    assert mean_abs_error(BELL, UNIFORM) == pytest.approx(25.0)
    assert mean_abs_error(BELL, UNIFORM, marked=["00", "11"]) == pytest.approx(25.0)
    assert rms_error(BELL, UNIFORM) == pytest.approx(25.0)


def test_hellinger_of_bell_against_uniform():
    """Test the Bell/uniform pair, whose classical fidelity is 1/2."""
    assert hellinger_fidelity(BELL, UNIFORM) == pytest.approx(0.5)
    assert hellinger_distance(BELL, UNIFORM) == pytest.approx((1 - 0.5 ** 0.5) ** 0.5)


def test_disjoint_supports():
    """Test maximal Hellinger distance."""
    a = OutcomeDistribution.point("0")
    b = OutcomeDistribution.point("1")

    assert hellinger_distance(a, b) == pytest.approx(1.0)
    assert hellinger_fidelity(a, b) == pytest.approx(0.0)
    assert mean_abs_error(a, b) == pytest.approx(100.0)


def test_hellinger_is_symmetric():
    """Test f(P, Q) == f(Q, P) on random three-bit distributions."""
    rng = np.random.default_rng(12)
    keys = [format(i, "03b") for i in range(8)]
    for _ in range(20):
        p, q = rng.dirichlet(np.ones(8)), rng.dirichlet(np.full(8, 0.3))
        a = OutcomeDistribution(3, {k: float(v) for k, v in zip(keys, p)})
        b = OutcomeDistribution(3, {k: float(v) for k, v in zip(keys, q)})

        assert hellinger_fidelity(a, b) == pytest.approx(hellinger_fidelity(b, a), abs=1e-12)
        assert hellinger_distance(a, b) == pytest.approx(hellinger_distance(b, a), abs=1e-12)


def test_hellinger_rejects_unnormalized():
    """Test the normalization check."""
    with pytest.raises(MetricError):
        hellinger_distance(OutcomeDistribution(1, {"0": 0.7}), OutcomeDistribution.point("0"))


def test_width_mismatch():
    """Test distributions over different bit counts."""
    with pytest.raises(MetricError):
        mean_abs_error(BELL, OutcomeDistribution.point("0"))


def test_marked_state_width_checked():
    """Test a marked state of the wrong width."""
    with pytest.raises(MetricError):
        mean_abs_error(BELL, UNIFORM, marked=["000"])


def test_error_report_fields():
    """Test that the report agrees with the individual metrics."""
    report = error_report(BELL, UNIFORM)

    assert report.e_mean == pytest.approx(mean_abs_error(BELL, UNIFORM))
    assert report.hellinger_fidelity == pytest.approx(0.5)
    assert report.n_states == 4


def test_raw_r_squared_single_sample():
    """Test the uncentered R^2 on the walk-through sample."""
    assert r_squared([64.343], [59.210]) == pytest.approx(0.993, abs=1e-3)


def test_r_squared_rejects_zero_total():
    """Test an all-zero actual vector."""
    with pytest.raises(MetricError):
        r_squared([0.0, 0.0], [1.0, 1.0])


def test_scorecard():
    """Test RMSE, MSE and the adjusted R^2 formula."""
    actual = [1.0, 2.0, 3.0, 4.0, 5.0]
    predicted = [1.0, 2.0, 3.0, 4.0, 7.0]
    card = model_scorecard(actual, predicted, n_features=1)

    assert card.mse == pytest.approx(4.0 / 5)
    assert card.rmse == pytest.approx((4.0 / 5) ** 0.5)
    assert card.mean_error == pytest.approx(0.4)
    assert card.r2 == pytest.approx(1 - 4.0 / 55)
    assert card.adjusted_r2 == pytest.approx(1 - (4.0 / 55) * 4 / 3)
    assert card.r2_centered == pytest.approx(1 - 4.0 / 10)


def test_scorecard_needs_enough_samples():
    """Test the sample-count guard of adjusted R^2."""
    with pytest.raises(MetricError):
        model_scorecard([1.0, 2.0], [1.0, 2.0], n_features=1)


def test_scorecard_without_adjusted_r2():
    """Test that a degenerate sample count can leave adjusted R^2 unreported."""
    card = model_scorecard([1.0, 2.0], [1.0, 2.5], n_features=1, require_adjusted=False)

    assert card.adjusted_r2 is None
    assert card.n_features == 1
    assert card.r2 == pytest.approx(1 - 0.25 / 5)
