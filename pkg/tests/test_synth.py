import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from biovit.session import export_csv
from biovit.synth import (
    SynthError,
    SynthSpec,
    derive_seed,
    gaussians,
    generate,
    generate_cohort,
    mix64,
    reference_like_specs,
    splitmix64,
    uniforms,
)
from biovit.trend import TrendError, TrendModelKind, fit_quadratic

Q = TrendModelKind.QUADRATIC


def test_splitmix64_reference_vectors():
    assert [int(v) for v in splitmix64(0, 3)] == [
        0xE220A8397B1DCDAF,
        0x6E789E6AA1B965F4,
        0x06C45D188009454F,
    ]
    assert int(splitmix64(1234567, 1)[0]) == 6457827717110365317


def test_vector_and_scalar_mixers_agree():
    gamma = 0x9E3779B97F4A7C15
    for seed in (0, 1, 2**63 + 5, 2**64 - 1):
        out = splitmix64(seed, 4)
        assert [int(v) for v in out] == [mix64(seed + k * gamma) for k in range(1, 5)]


def test_uniforms_in_unit_interval():
    u = uniforms(42, 100_000)
    assert u.min() > 0 and u.max() <= 1
    assert abs(u.mean() - 0.5) < 0.005


def test_gaussian_moments():
    z = gaussians(7, 200_000)
    assert abs(z.mean()) < 0.01
    assert abs(z.std() - 1) < 0.01
    # a prefix of a longer stream is the shorter stream
    np.testing.assert_array_equal(gaussians(7, 11), z[:11])


def test_same_seed_bit_identical():
    spec = SynthSpec(500, Q, (60.0, 0.01, -0.00002), 12.0, True, 99, True)
    a, b = generate(spec, "x"), generate(spec, "x")
    assert a == b
    assert export_csv(a) == export_csv(b)
    c = generate(SynthSpec(500, Q, (60.0, 0.01, -0.00002), 12.0, True, 100, True), "x")
    assert a != c


def test_noiseless_refit_closure_at_full_length():
    s = generate(SynthSpec(77_566, Q, (89.376, -0.000305, 0.0)))
    f = fit_quadratic(s)
    assert f.coefficients[0] == pytest.approx(89.376, rel=1e-6)
    assert f.coefficients[1] == pytest.approx(-0.000305, rel=1e-6)
    assert abs(f.coefficients[2]) < 1e-13


def test_single_sample_session():
    s = generate(SynthSpec(1, Q, (50.0, 0.0, 0.0)))
    assert len(s) == 1
    with pytest.raises(TrendError):
        fit_quadratic(s)


@settings(max_examples=50)
@given(st.floats(0, 100), st.floats(-0.01, 0.01), st.integers(2, 200))
def test_clamp_is_identity_inside_range(b0, b1, n):
    y_end = b0 + b1 * n
    if not 0 <= y_end <= 100:
        return
    spec = dict(n_samples=n, trend=TrendModelKind.LINEAR, coefficients=(b0, b1))
    plain, clamped = generate(SynthSpec(**spec)), generate(SynthSpec(**spec, clamp=True))
    assert plain == clamped
    assert clamped.metadata["clamped"] == 0


def test_clamp_flags_and_unclamped_rejects():
    spec = SynthSpec(1000, Q, (95.0, 0.0, 0.0), 10.0, True, 3)
    s = generate(spec)
    assert s.attention.max() == 100
    assert s.metadata["clamped"] > 0
    with pytest.raises(SynthError):
        generate(SynthSpec(1000, Q, (95.0, 0.0, 0.0), 10.0, False, 3))


def test_nonfinite_trend_rejected():
    with pytest.raises(SynthError):
        generate(SynthSpec(2000, TrendModelKind.EXPONENTIAL, (1.0, 1e10)))


@pytest.mark.parametrize("kw", [dict(n_samples=0), dict(noise_sd=-1), dict(seed=-1), dict(seed=2**64)])
def test_spec_validation(kw):
    base = dict(n_samples=10, trend=Q, coefficients=(1.0, 0.0, 0.0))
    with pytest.raises(SynthError):
        SynthSpec(**{**base, **kw})


def test_cohort_streams_are_independent():
    specs = [SynthSpec(300, Q, (50.0, 0.0, 0.0), 10.0, True, 5, True)] * 3
    a, b, c = generate_cohort(specs)
    assert [s.participant_id for s in (a, b, c)] == ["P01", "P02", "P03"]
    assert a != b and b != c
    assert a.metadata["seed"] == derive_seed(5, 0)
    assert generate_cohort(specs) == [a, b, c]
    assert generate_cohort([]) == []


def test_reference_like_cohort():
    specs = reference_like_specs(400, seed=1)
    sessions = generate_cohort(specs)
    assert len(sessions) == 18
    assert len({s.participant_id for s in sessions}) == 18
    for s in sessions:
        assert np.all(s.attention == np.rint(s.attention))
        assert s.attention.min() >= 0 and s.attention.max() <= 100
