import json
import math

import numpy as np
import pytest

from randinfo.spectra import (
    DivergentSpectrumError,
    Spectrum,
    SpectrumError,
    default_truncation,
    parse_spectrum,
)


def test_semi_axis_power_law():
    s = Spectrum.power_law(1.0, 16)
    assert s.semi_axis(4) == 0.25


def test_semi_axis_geometric():
    s = Spectrum.geometric(0.5, 16)
    assert s.semi_axis(3) == 0.125


def test_semi_axis_explicit_lookup_and_range():
    s = Spectrum.explicit([1.0, 0.5, 0.1])
    assert s.semi_axis(2) == 0.5
    with pytest.raises(IndexError):
        s.semi_axis(4)
    assert s.axis_or_zero(4) == 0.0


def test_semi_axis_beyond_truncation_analytic():
    s = Spectrum.power_law(2.0, 8)
    assert s.semi_axis(100) == pytest.approx(100.0**-2.0, rel=1e-15)


def test_tail_sum_geometric_closed_form():
    # sigma_k = 2^-k: sum_{k>2} 4^-k = (1/64) / (3/4) = 1/48
    s = Spectrum.geometric(0.5, 512)
    assert s.tail_sum(2).value == pytest.approx(1.0 / 48.0, rel=1e-14)


def test_tail_sum_empty_tail():
    s = Spectrum.explicit([1.0, 0.5])
    t = s.tail_sum(2)
    assert t.value == 0.0 and t.beyond == 0.0 and not t.truncated_only


def test_tail_sum_power_law_truncated():
    s = Spectrum.power_law(1.0, 3)
    assert s.tail_sum(0).value == pytest.approx(1.0 + 0.25 + 1.0 / 9.0, rel=1e-12)


def test_tail_sum_matches_direct_summation():
    s = Spectrum.power_law(1.0, 512)
    for n in (0, 5, 32, 511):
        direct = float(np.sum(np.arange(n + 1, 513, dtype=float) ** -2))
        assert s.tail_sum(n).value == pytest.approx(direct, rel=1e-12)


def test_tail_difference_is_squared_axis():
    for s in (
        Spectrum.power_law(1.0, 256),
        Spectrum.geometric(0.7, 256),
        Spectrum.power_log(1.0, 0.5, 256),
        Spectrum.explicit(np.linspace(2.0, 0.1, 40)),
    ):
        for n in (0, 3, 17):
            lhs = s.tail_sum(n).value - s.tail_sum(n + 1).value
            assert lhs == pytest.approx(s.semi_axes[n] ** 2, rel=1e-12)


def test_benchmark_bound_geometric():
    s = Spectrum.geometric(0.5, 512)
    assert s.benchmark_bound(2) == pytest.approx(math.sqrt(1.0 / 96.0), rel=1e-12)


def test_benchmark_bound_zero_tail():
    assert Spectrum.explicit([1.0, 0.5]).benchmark_bound(2) == 0.0


def test_benchmark_bound_power_law_against_summation_oracle():
    s = Spectrum.power_law(1.0, 512)
    oracle = math.sqrt(float(np.sum(np.arange(33, 513, dtype=float) ** -2)) / 32)
    assert s.benchmark_bound(32) == pytest.approx(oracle, rel=1e-12)


def test_divergent_flagging():
    s = Spectrum.power_law(0.4, 128)
    assert not s.square_summable
    assert s.tail_sum(0).truncated_only
    assert math.isinf(s.tail_sum(0).beyond)
    with pytest.raises(DivergentSpectrumError):
        s.require_square_summable()
    # boundary cases for power_log
    assert not Spectrum.power_log(0.5, 0.5, 64).square_summable
    assert Spectrum.power_log(0.5, 0.6, 64).square_summable


def test_validation_errors():
    with pytest.raises(SpectrumError):
        Spectrum.power_law(-1.0, 8)
    with pytest.raises(SpectrumError):
        Spectrum.geometric(1.5, 8)
    with pytest.raises(SpectrumError):
        Spectrum.explicit([1.0, 2.0])  # increasing
    with pytest.raises(SpectrumError):
        Spectrum.explicit([1.0, 0.0])  # not strictly positive


def test_default_truncation_rule():
    assert default_truncation(32, 555) == 4440
    assert default_truncation(4, 4) == 512
    assert default_truncation(200, 10) == 800


def test_json_round_trip():
    for s in (
        Spectrum.power_law(1.5, 64),
        Spectrum.power_log(1.0, 2.0, 32),
        Spectrum.geometric(0.25, 16),
        Spectrum.explicit([3.0, 2.0, 1.0]),
    ):
        blob = json.dumps(s.to_json())
        back = Spectrum.from_json(blob)
        assert back.kind == s.kind and back.dim == s.dim
        np.testing.assert_allclose(back.semi_axes, s.semi_axes, rtol=0)


def test_parse_spectrum():
    assert parse_spectrum("power_law:1.0").semi_axis(2) == 0.5
    assert parse_spectrum("geometric:0.5", 8).dim == 8
    assert parse_spectrum("power_log:1.0,0.5").kind == "power_log"
    assert parse_spectrum("explicit:1,0.5,0.1").dim == 3
    with pytest.raises(SpectrumError):
        parse_spectrum("weird:1")
    with pytest.raises(SpectrumError):
        parse_spectrum("power_law:abc")


def test_with_dim():
    s = Spectrum.power_law(1.0, 64).with_dim(128)
    assert s.dim == 128 and s.semi_axis(100) == pytest.approx(0.01)
    with pytest.raises(SpectrumError):
        Spectrum.explicit([1.0]).with_dim(4)
