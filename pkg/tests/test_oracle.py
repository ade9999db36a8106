import numpy as np
import pytest

from kdvdecay.datum import InitialDatum
from kdvdecay.oracle import (
    HEADER,
    convergence_order,
    fitted_order,
    level_parameters,
    read_cached,
    reference_solve,
    restrict,
    write_cached,
)
from kdvdecay.scenario import DampingSpec, Scenario

SMALL = dict(N=1001, dt=2e-3)


def linear_scenario(shape="constant", a0=1.0, nonlinear=False):
    return Scenario(L=50.0, damping=DampingSpec(shape, a0, 10.0), datum=InitialDatum("gaussian", 5.0, 1.0, 1.0),
                    nonlinear=nonlinear)


class TestCache:
    def test_roundtrip_bit_identical(self, cache_dir):
        sc = linear_scenario(nonlinear=True)
        first = reference_solve(sc, 0.2, cache_dir=cache_dir, **SMALL)
        files = list(cache_dir.iterdir())
        assert len(files) == 1 and not files[0].name.startswith(".tmp")
        again = reference_solve(sc, 0.2, cache_dir=cache_dir, **SMALL)
        assert first.u.tobytes() == again.u.tobytes()

    def test_binary_layout(self, tmp_path):
        u = np.linspace(0, 1, 11)
        path = tmp_path / "x.bin"
        write_cached(path, 42, 11, 5.0, 0.1, 1.0, u)
        raw = path.read_bytes()
        assert len(raw) == HEADER.size + 11 * 8 == 40 + 88
        assert HEADER.unpack_from(raw) == (42, 11, 5.0, 0.1, 1.0)
        assert np.array_equal(np.frombuffer(raw[40:], "<f8"), u)

    def test_header_mismatch_is_a_miss(self, tmp_path):
        path = tmp_path / "x.bin"
        write_cached(path, 42, 11, 5.0, 0.1, 1.0, np.zeros(11))
        assert read_cached(path, 43, 11, 5.0, 0.1, 1.0) is None
        assert read_cached(path, 42, 11, 5.0, 0.2, 1.0) is None
        assert read_cached(tmp_path / "missing.bin", 42, 11, 5.0, 0.1, 1.0) is None
        path.write_bytes(path.read_bytes()[:-8])
        assert read_cached(path, 42, 11, 5.0, 0.1, 1.0) is None

    def test_distinct_scenarios_distinct_keys(self):
        a, b = linear_scenario(), linear_scenario(a0=1.1)
        assert a.digest(N=1) != b.digest(N=1)
        assert a.digest(N=1) != a.digest(N=2)


class TestReference:
    def test_zero_datum(self, cache_dir):
        sc = Scenario(datum=InitialDatum("zero"))
        assert not np.any(reference_solve(sc, 0.1, cache_dir=cache_dir, **SMALL).u)

    def test_gauge_factor(self, cache_dir):
        a0, T = 1.0, 1.0
        damped = reference_solve(linear_scenario("constant", a0), T, cache_dir=cache_dir, **SMALL).u
        free = reference_solve(linear_scenario("none"), T, cache_dir=cache_dir, **SMALL).u
        scaled = np.exp(-a0 * T) * free
        # the rescaling is exact only up to the O(dt^2) time error; 2e-3 gives a few 1e-7
        assert np.abs(damped - scaled).max() <= 5e-6 * np.abs(scaled).max()


class TestConvergence:
    def test_ode_limit_second_order(self):
        sc = Scenario(L=50.0, damping=DampingSpec("constant", 1.5), datum=InitialDatum("gaussian", 5.0, 1.0, 1.0),
                      nonlinear=False, transport=False)
        study = convergence_order(sc, levels=4, N0=101, dt0=0.1, T=2.0)
        assert study.valid and min(study.errors) > 1e-12
        assert study.order == pytest.approx(2.0, abs=0.2)

    def test_full_scheme_order(self):
        study = convergence_order(linear_scenario(shape="step", a0=1.5, nonlinear=True), levels=3,
                                  N0=501, dt0=4e-3, T=1.0)
        assert study.valid and study.order >= 1.8

    def test_identical_levels_invalid(self):
        study = convergence_order(linear_scenario(), levels=3, N0=101, dt0=0.01, T=0.1, factor=1)
        assert study.errors == [0.0, 0.0] and not study.valid

    def test_needs_three_levels(self):
        with pytest.raises(ValueError):
            convergence_order(linear_scenario(), levels=2)

    def test_helpers(self):
        assert level_parameters(101, 0.1, 3) == [(101, 0.1), (201, 0.05), (401, 0.025)]
        h = np.array([0.1, 0.05, 0.025])
        assert fitted_order(h, 3 * h**2) == pytest.approx(2.0, abs=1e-12)
        assert np.isnan(fitted_order(h, [1.0, 0.0, 0.0]))
        assert np.array_equal(restrict(np.arange(9.0), 3), [0.0, 4.0, 8.0])
        with pytest.raises(ValueError):
            restrict(np.arange(10.0), 3)


@pytest.mark.slow
def test_reference_self_consistency(cache_dir):
    sc = Scenario()
    ref = reference_solve(sc, 1.0, cache_dir=cache_dir).u
    half = reference_solve(sc, 1.0, dt=1e-4, cache_dir=cache_dir).u
    assert np.abs(ref - half).max() < 1e-5 * np.abs(half).max()
