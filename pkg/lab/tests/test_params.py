import math

import numpy as np
import pytest
from pydantic import ValidationError

from controllers.params_controller import (
    derived_exponents,
    is_critical,
    radial_threshold,
    require_regime,
    validate_regime,
)
from models.params_model import ModelParams, Theorem
from utils.errors import RegimeError


def test_exponent_identities_on_random_parameters():
    rng = np.random.default_rng(7)
    for _ in range(10_000):
        params = ModelParams(N=int(rng.integers(1, 11)), b=rng.uniform(0, 5), q=rng.uniform(1.01, 20))
        ex = derived_exponents(params)
        assert ex.D + ex.E == pytest.approx(1 + params.q, rel=1e-12)
        assert ex.s_c * (params.q - 1) == pytest.approx(2 * (ex.D - 2), rel=1e-12, abs=1e-12)


def test_D_is_two_at_mass_critical_exponent():
    for N, b in [(2, 1.0), (3, 0.5), (5, 2.0)]:
        q_m = derived_exponents(ModelParams(N=N, b=b, q=2)).q_m
        ex = derived_exponents(ModelParams(N=N, b=b, q=q_m))
        assert ex.D == pytest.approx(2, abs=1e-12)
        assert ex.s_c == pytest.approx(0, abs=1e-12)


def test_E_vanishes_at_energy_critical_exponent():
    q_e = derived_exponents(ModelParams(N=6, b=1, q=2)).q_e
    assert q_e == pytest.approx(1 + 10 / 2)
    ex = derived_exponents(ModelParams(N=6, b=1, q=q_e))
    assert ex.E == pytest.approx(0, abs=1e-12)
    assert ex.s_c == pytest.approx(2, abs=1e-12)


def test_energy_critical_exponent_infinite_in_low_dimension():
    ex = derived_exponents(ModelParams(N=4, b=1, q=3))
    assert math.isinf(ex.q_e)
    assert not ex.energy_critical_finite


def test_invalid_parameters_rejected():
    with pytest.raises(ValidationError):
        ModelParams(N=2, b=1, q=1)
    with pytest.raises(ValidationError):
        ModelParams(N=0, b=1, q=3)
    with pytest.raises(ValidationError):
        ModelParams(N=2, b=-1, q=3)


def test_gn_regime_needs_radial_lower_bound():
    params = ModelParams(N=2, b=2, q=4)
    assert radial_threshold(params) == 5
    report = validate_regime(params, Theorem.GN)
    assert not report.passed
    assert [check.name for check in report.violations] == ["radial lower bound"]

    assert validate_regime(ModelParams(N=2, b=1, q=4), Theorem.GN).passed


def test_require_regime_raises_with_report_payload():
    with pytest.raises(RegimeError) as info:
        require_regime(ModelParams(N=2, b=2, q=4), Theorem.GN)
    assert info.value.exit_code == 3
    assert info.value.payload["theorem"] == "GN"
    assert "radial lower bound" in str(info.value.payload)


def test_dichotomy_blowup_window():
    assert validate_regime(ModelParams(N=3, b=1, q=5), Theorem.DICHOTOMY_BLOWUP).passed
    too_large = validate_regime(ModelParams(N=3, b=1, q=9.5), Theorem.DICHOTOMY_BLOWUP)
    assert "q <= 9" in [check.name for check in too_large.violations]
    below_mass_critical = validate_regime(ModelParams(N=3, b=1, q=4), Theorem.DICHOTOMY_BLOWUP)
    assert not below_mass_critical.passed


def test_mass_critical_point_selects_infinite_time_branch():
    report = validate_regime(ModelParams(N=2, b=1, q=6), Theorem.DICHOTOMY_BLOWUP)
    assert report.passed
    assert any("infinite-time" in check.detail for check in report.checks)


def test_advisory_when_energy_critical_exponent_is_small():
    report = validate_regime(ModelParams(N=7, b=1, q=4), Theorem.DICHOTOMY_BLOWUP)
    assert any("q <= 9" in advisory for advisory in report.advisories)


def test_homogeneous_comparison_mode():
    report = validate_regime(ModelParams(N=3, b=0, q=3), Theorem.GN)
    assert report.homogeneous_comparison
    assert any("homogeneous" in advisory for advisory in report.advisories)


def test_compact_embedding_window():
    assert validate_regime(ModelParams(N=3, b=1, q=5), Theorem.COMPACT_EMBEDDING).passed
    assert not validate_regime(ModelParams(N=3, b=1, q=2), Theorem.COMPACT_EMBEDDING).passed
    assert not validate_regime(ModelParams(N=6, b=1, q=6), Theorem.COMPACT_EMBEDDING).passed


def test_is_critical():
    assert is_critical(6.0, 1 + 10 / 2)
    assert not is_critical(6.0, 6.001)
    assert not is_critical(6.0, math.inf)
