"""Acceptance criteria, one test each, at their stated tolerances.

Every test prints a single ``[PASS]``/``[FAIL]`` line, visible without ``-s``,
before asserting. Criteria that the reference data cannot meet still run
literally and fail; their diagnostics explain why.
"""

import random
import time

import numpy as np
import pytest
from hypothesis import given, strategies as st

from biovit.cohort import DECLINED_IDS, OBSERVATIONS, REFERENCE_COHORT, RETAINED_IDS, reference_records
from biovit.efga import efga_score, format_efga, retention_rate, split_groups
from biovit.pipeline import PipelineConfig, run_pipeline
from biovit.protocol import DataPacket, decode_stream, encode_packet
from biovit.session import export_csv
from biovit.stats import Direction, anderson_darling, mann_whitney, standardized_alpha
from biovit.synth import gaussians, generate_cohort, reference_like_specs, uniforms
from biovit.trend import fit_exponential, fit_linear, fit_quadratic, fit_scurve

from oracles import enumerate_rank_sum_p, permutation_p

BY_ID = {r.participant_id: r for r in REFERENCE_COHORT}


@pytest.fixture
def verdict(capsys):
    def emit(n: int, ok: bool, text: str):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n}: {text}")
        assert ok, text

    return emit


def test_criterion_1_efga_reproduction(verdict):
    t0 = time.perf_counter()
    values = {r.participant_id: efga_score(r.mo, r.mape) for r in REFERENCE_COHORT}
    reported = {r.participant_id: f"{r.efga_reported:.2f}" for r in REFERENCE_COHORT}
    rounded = [pid for pid, v in values.items() if format_efga(v, mode="round") == reported[pid]]
    truncated = [pid for pid, v in values.items() if format_efga(v, mode="truncate") == reported[pid]]
    elapsed = time.perf_counter() - t0
    misses = ", ".join(
        f"{pid} {values[pid]:.4f}->{reported[pid]}" for pid in values if pid not in rounded
    )
    verdict(
        1,
        len(rounded) == 18 and elapsed < 1.0,
        f"rounded EFGA matches {len(rounded)}/18 reference values in {elapsed:.3f}s "
        f"(truncation matches {len(truncated)}/18; rounding misses: {misses})",
    )


def test_criterion_2_group_split(verdict):
    records = reference_records()
    retained, declined = split_groups(records)
    got_r = {r.participant_id for r in retained}
    got_d = {r.participant_id for r in declined}
    rate = retention_rate(records)
    ok = got_r == set(RETAINED_IDS) and got_d == set(DECLINED_IDS) and rate == 77.8
    verdict(2, ok, f"retained n={len(got_r)}, declined n={len(got_d)} {sorted(got_d)}, retention {rate}")


def test_criterion_3_mann_whitney(verdict):
    t0 = time.perf_counter()
    mo_r, mape_r = [BY_ID[i].mo for i in RETAINED_IDS], [BY_ID[i].mape for i in RETAINED_IDS]
    mo_d, mape_d = [BY_ID[i].mo for i in DECLINED_IDS], [BY_ID[i].mape for i in DECLINED_IDS]
    r = mann_whitney(mo_r, mape_r, Direction.GREATER)
    d = mann_whitney(mo_d, mape_d, Direction.LESS)
    enum_p, _ = enumerate_rank_sum_p(mo_d, mape_d, "Less")
    mc_p = permutation_p(mo_r, mape_r, "Greater", n_perm=10**6, seed=20240101)
    elapsed = time.perf_counter() - t0
    ok = (
        r.p_value <= 0.005
        and d.p_value <= 0.05
        and (enum_p * 70).denominator == 1  # k / C(8, 4)
        and abs(d.p_value - float(enum_p)) < 1e-12
        and abs(r.p_value - mc_p) <= 0.0005
        and elapsed < 30
    )
    verdict(
        3,
        ok,
        f"14v14 Greater p={r.p_value:.3g} (MC 1e6: {mc_p:.3g}); 4v4 Less p={d.p_value:.5f} "
        f"(enumeration over 70 labelings: {enum_p * 70}/70); {elapsed:.1f}s",
    )


@given(st.floats(-0.99, 1.0, exclude_max=True))
def test_criterion_4_alpha_identity_property(r):
    assert standardized_alpha(r, 2) == pytest.approx(2 * r / (1 + r), rel=1e-12, abs=1e-12)


def test_criterion_4_cronbach(verdict):
    alpha = standardized_alpha(0.922, 2)
    # the property half runs as test_criterion_4_alpha_identity_property
    verdict(4, abs(alpha - 0.959) <= 0.0005, f"alpha(r=0.922) = {alpha:.5f} vs 0.959 +/- 0.0005")


def _draw(seed, lo, hi):
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    return lo + (hi - lo) * uniforms(seed, lo.size)


def test_criterion_5_trend_recovery(verdict):
    t0 = time.perf_counter()
    worst = {}
    t200, t100 = np.arange(1, 201.0), np.arange(1, 101.0)
    errs = []
    for i in range(100):
        c = _draw(1000 + i, [20, -0.2], [80, 0.2])
        f = fit_linear(c[0] + c[1] * t200)
        errs.append(np.max(np.abs(np.subtract(f.coefficients, c)) / np.abs(c)))
    worst["linear"] = max(errs)
    errs = []
    for i in range(100):
        c = _draw(2000 + i, [20, -0.3, -0.002], [80, 0.3, 0.002])
        f = fit_quadratic(c[0] + c[1] * t200 + c[2] * t200**2)
        errs.append(np.max(np.abs(np.subtract(f.coefficients, c)) / np.abs(c)))
    worst["quadratic"] = max(errs)
    errs = []
    for i in range(100):
        c = _draw(3000 + i, [1, 0.98], [50, 1.02])
        f = fit_exponential(c[0] * c[1] ** t100)
        errs.append(np.max(np.abs(np.subtract(f.coefficients, c)) / np.abs(c)))
    worst["exponential"] = max(errs)
    errs = []
    for i in range(100):
        c = _draw(4000 + i, [1, 1, 0.85], [2, 20, 0.97])
        y = 100 / (c[0] + c[1] * c[2] ** t100)
        errs.append(np.max(np.abs(fit_scurve(y).fitted - y)))
    worst["scurve_abs"] = max(errs)
    elapsed = time.perf_counter() - t0
    ok = (
        max(worst["linear"], worst["quadratic"], worst["exponential"]) <= 1e-6
        and worst["scurve_abs"] <= 1e-3
        and elapsed < 60
    )
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    verdict(5, ok, f"worst error over 100 draws per family: {detail}; {elapsed:.1f}s")


def test_criterion_6_nested_models(verdict):
    violations = 0
    for i in range(1000):
        n = 4 + int(uniforms(5000 + i, 1)[0] * 300)
        y = np.rint(100 * uniforms(6000 + i, n))
        if fit_quadratic(y).accuracy.msd > fit_linear(y).accuracy.msd:
            violations += 1
    verdict(6, violations == 0, f"quadratic MSD > linear MSD in {violations}/1000 series")


def test_criterion_7_anderson_darling(verdict):
    # seeds fixed in advance: 0..99 for both arms
    normal_p = [anderson_darling(gaussians(s, 5000)).p_value for s in range(100)]
    uniform_disp = [anderson_darling(uniforms(s, 5000)).p_display for s in range(100)]
    kept = sum(p > 0.05 for p in normal_p)
    floored = sum(p == 0.005 for p in uniform_disp)
    verdict(
        7,
        kept >= 95 and floored == 100,
        f"normal n=5000: p > 0.05 in {kept}/100 (need >= 95; a well-calibrated test "
        f"reaches 95 with probability ~0.62); uniform floored at 0.005 in {floored}/100",
    )


def _random_packet(rng):
    def maybe(hi):
        return rng.randint(0, hi) if rng.random() < 0.7 else None

    raw = tuple(rng.randint(-(2**15), 2**15 - 1) for _ in range(rng.randint(0, 8)))
    return DataPacket(maybe(200), maybe(100), maybe(100), raw)


def test_criterion_8_protocol_robustness(verdict):
    rng = random.Random(8)
    round_trip_bad = 0
    for _ in range(10_000):
        p = _random_packet(rng)
        if decode_stream(encode_packet(p)) != ([p], []):
            round_trip_bad += 1
    silent = wrong = 0
    for _ in range(10_000):
        p = _random_packet(rng)
        frame = bytearray(encode_packet(p))
        frame[rng.randrange(len(frame))] ^= 1 << rng.randrange(8)
        pkts, errs = decode_stream(bytes(frame))
        bad = sum(q != p for q in pkts)
        wrong += bad
        if bad and not errs:
            silent += 1
    verdict(
        8,
        round_trip_bad == 0 and silent == 0,
        f"round-trip failures {round_trip_bad}/10000; silently wrong packets {silent}/10000 "
        f"(wrong packets accompanied by a frame error: {wrong})",
    )


@pytest.mark.slow
def test_criterion_9_full_scale(verdict, tmp_path):
    t0 = time.perf_counter()
    paths = []
    for s in generate_cohort(reference_like_specs(OBSERVATIONS, seed=9)):
        path = tmp_path / f"{s.participant_id}.csv"
        path.write_text(export_csv(s), encoding="utf-8")
        paths.append(path)
    report = run_pipeline(PipelineConfig(input_paths=paths))
    elapsed = time.perf_counter() - t0
    ok = (
        len(report.normality) == 18
        and all(row["n"] == OBSERVATIONS for row in report.descriptives)
        and report.retention_rate is not None
        and elapsed < 120
    )
    verdict(9, ok, f"18 x {OBSERVATIONS} samples through the full pipeline in {elapsed:.1f}s")
