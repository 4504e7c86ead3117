"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest -v -s tests/test_acceptance.py` to see the per-criterion
lines alongside pytest's own verdicts.
"""

import itertools
import json
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from _oracles import scenario_reference, ssim_reference, threshold_reference
from conftest import constant_image, random_image
from demorpheval.biometric import ScoreSet, compute_threshold_at_fmr
from demorpheval.dataset import ScenarioSplit, classify_scenario
from demorpheval.harness import (
    materialize_baseline,
    render_report,
    run_evaluation,
    sanity_suite,
)
from demorpheval.iqa import cap_psnr, psnr, ssim
from demorpheval.pairing import (
    STRAIGHT,
    bw_iqa,
    check_demorph_conditions,
    paired_iqa,
    resolve_pairing,
)
from demorpheval.synth import build_grid_store, make_benchmark

BW_GAP_REGRESSION_BOUND = 0.75  # observed 0.8617 on the pinned seed; spec floor is 0.1
SANITY_PINNED_CROSSOVER = 60  # first crossover sigma observed for the default seed


@contextmanager
def criterion(number, description):
    try:
        yield
    except BaseException:
        print(f"[FAIL] criterion {number}: {description}", flush=True)
        raise
    print(f"[PASS] criterion {number}: {description}", flush=True)


@pytest.fixture(scope="module")
def bench(tmp_path_factory):
    """The acceptance benchmark: 100 alpha-0.5 morphs over 40 texture faces."""
    root = tmp_path_factory.mktemp("acceptance")
    timings = {}

    t0 = time.perf_counter()
    records, _ = make_benchmark(root, n_identities=40, n_morphs=100, alpha=0.5, seed=7)
    trivial_records, _ = materialize_baseline(records, "trivial", root / "trivial")
    trivial_store = build_grid_store(trivial_records)
    trivial_report, trivial_evals, _ = run_evaluation(
        trivial_records, trivial_store, dataset_name="synthetic", fmr=0.10, tau=0.4
    )
    timings["trivial_pipeline"] = time.perf_counter() - t0

    oracle_records, _ = materialize_baseline(records, "oracle", root / "oracle")
    oracle_store = build_grid_store(oracle_records)
    oracle_report, oracle_evals, _ = run_evaluation(
        oracle_records, oracle_store, dataset_name="synthetic", fmr=0.10, tau=0.4
    )
    return {
        "trivial_records": trivial_records,
        "trivial_store": trivial_store,
        "trivial_report": trivial_report,
        "trivial_evals": trivial_evals,
        "oracle_report": oracle_report,
        "oracle_evals": oracle_evals,
        "timings": timings,
    }


def test_criterion_01_trivial_degeneracy(bench):
    with criterion(1, "trivial demorpher: TMR@10%FMR = 100% and RA(tau=0.4) = 100%"):
        assert bench["trivial_report"].tmr_at_fmr == 1.0
        assert bench["trivial_report"].ra == 1.0
        assert bench["trivial_report"].n_morphs == 100
        assert bench["timings"]["trivial_pipeline"] < 10.0


def test_criterion_02_bw_discriminates(bench):
    with criterion(2, "BW(SSIM): oracle mean 2.0, trivial strictly lower per record"):
        oracle_mean = sum(ev.bw["ssim"] for ev in bench["oracle_evals"]) / len(
            bench["oracle_evals"]
        )
        assert abs(oracle_mean - 2.0) <= 1e-9
        for trivial_ev, oracle_ev in zip(bench["trivial_evals"], bench["oracle_evals"]):
            assert trivial_ev.bw["ssim"] < oracle_ev.bw["ssim"]
        trivial_mean = sum(ev.bw["ssim"] for ev in bench["trivial_evals"]) / len(
            bench["trivial_evals"]
        )
        gap = oracle_mean - trivial_mean
        assert gap >= 0.1  # the stated floor
        assert gap >= BW_GAP_REGRESSION_BOUND  # pinned regression bound


def test_criterion_03_ssim_oracle_equivalence():
    with criterion(3, "SSIM matches the brute-force oracle and the constant closed form"):
        rng = np.random.default_rng(42)
        for _ in range(50):
            a = random_image(rng, 32, 32)
            b = random_image(rng, 32, 32)
            expected = ssim_reference(
                a.pixels[:, :, 0].astype(np.float64), b.pixels[:, :, 0].astype(np.float64)
            )
            assert abs(ssim(a, b) - expected) < 1e-6
        closed_form = (2 * 100 * 50 + 6.5025) / (100**2 + 50**2 + 6.5025)
        assert abs(ssim(constant_image(100), constant_image(50)) - closed_form) < 1e-6


def test_criterion_04_psnr_closed_forms():
    with criterion(4, "PSNR closed forms: +16 offset, identical, full range"):
        a = constant_image(100, 16, 16, channels=3)
        offset = constant_image(116, 16, 16, channels=3)
        assert abs(psnr(a, offset) - 20 * math.log10(255 / 16)) <= 1e-9
        assert psnr(a, a) == math.inf
        assert cap_psnr(psnr(a, a)) == 100.0
        assert abs(psnr(constant_image(0), constant_image(255)) - 0.0) <= 1e-9


def test_criterion_05_threshold_oracle():
    with criterion(5, "threshold calibration matches exhaustive search on 200 score sets"):
        rng = np.random.default_rng(11)
        for case in range(200):
            n = int(rng.integers(1, 1001))
            impostors = rng.uniform(-1.0, 1.0, size=n)
            if case % 3 == 0:
                impostors = np.round(impostors, 1)  # force heavy ties
            impostors = list(impostors)
            target = float(rng.uniform(0.01, 0.99))
            scores = ScoreSet(genuine=[1.0], impostor=impostors)
            thr = compute_threshold_at_fmr(scores, target)
            expected_value, expected_fmr = threshold_reference(impostors, target)
            assert thr.value == expected_value
            assert thr.achieved_fmr == expected_fmr
            assert thr.achieved_fmr <= target
            # monotonicity: a stricter target never lowers the threshold
            stricter = compute_threshold_at_fmr(scores, target / 2.0)
            assert stricter.value >= thr.value


def test_criterion_06_permutation_invariance():
    with criterion(6, "swapping outputs changes no metric on 1000 random score grids"):
        rng = np.random.default_rng(13)

        def all_metrics(b, q):
            b11, b22, b12, b21 = b
            q11, q22, q12, q21 = q
            pairing = resolve_pairing(b11, b22, b12, b21)
            matched = (b11, b22) if pairing == STRAIGHT else (b12, b21)
            return (
                paired_iqa(q11, q22, q12, q21),
                bw_iqa(b11, b22, b12, b21, q11, q22, q12, q21),
                matched[0] > 0.4 and matched[1] > 0.4,
                check_demorph_conditions(0.25, b11, b22, b12, b21, 0.5, 0.3),
            )

        for _ in range(1000):
            b = tuple(rng.uniform(0.0, 1.0, 4))
            q = tuple(rng.uniform(-1.0, 1.0, 4))
            swapped_b = (b[3], b[2], b[1], b[0])
            swapped_q = (q[3], q[2], q[1], q[0])
            assert all_metrics(b, q) == all_metrics(swapped_b, swapped_q)


def test_criterion_07_scenario_classifier():
    with criterion(7, "scenario classifier matches the set-relation oracle on 49 cases"):
        universe = ("a", "b", "c")
        subsets = [
            frozenset(combo)
            for r in range(1, 4)
            for combo in itertools.combinations(universe, r)
        ]
        cases = 0
        for train in subsets:
            for test in subsets:
                split = ScenarioSplit(train, test)
                assert classify_scenario(split) == scenario_reference(train, test)
                cases += 1
        assert cases == 49


def test_criterion_08_figure_crossover(tmp_path):
    with criterion(8, "sanity suite finds an SSIM/BW crossover noise level (epsilon 0.3)"):
        result = sanity_suite(seed=0, out_dir=tmp_path, epsilon=0.3)
        assert result["crossover_sigmas"]
        assert all(10 <= s <= 80 for s in result["crossover_sigmas"])
        assert SANITY_PINNED_CROSSOVER in result["crossover_sigmas"]
        rows = {row["sigma"]: row for row in result["noise_sweep"]}
        for sigma in result["crossover_sigmas"]:
            assert result["other_subject"]["ssim"] > rows[sigma]["noisy_ssim"]
            assert rows[sigma]["noisy_bw_ssim"] > result["other_subject"]["bw_ssim"]


def test_criterion_09_thread_determinism(bench):
    with criterion(9, "evaluate with 1 and 8 threads emits byte-identical JSON"):
        single, _, _ = run_evaluation(
            bench["trivial_records"], bench["trivial_store"], dataset_name="synthetic"
        )
        pooled, _, _ = run_evaluation(
            bench["trivial_records"],
            bench["trivial_store"],
            dataset_name="synthetic",
            threads=8,
        )
        assert render_report(single, "json").encode() == render_report(pooled, "json").encode()
