import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import threshold_reference
from demorpheval.biometric import (
    Embedding,
    MatchThreshold,
    ScoreSet,
    compute_threshold_at_fmr,
    cosine_similarity,
    impostor_score_for_output,
    restoration_accuracy,
    tmr,
)
from demorpheval.errors import (
    DimensionMismatchError,
    EmptyGalleryAfterExclusionError,
    EmptyGenuineSetError,
    EmptyImpostorSetError,
    EmptyRecordSetError,
    ValidationError,
    ZeroVectorError,
)


def emb(vector, eid="e"):
    return Embedding(id=eid, vector=np.asarray(vector, dtype=np.float64))


class TestCosine:
    def test_identical_basis_vector(self):
        e = emb([1.0, 0.0, 0.0])
        assert cosine_similarity(e, e) == 1.0

    def test_orthogonal(self):
        assert cosine_similarity(emb([1.0, 0.0]), emb([0.0, 1.0])) == 0.0

    def test_45_degrees(self):
        value = cosine_similarity(emb([1.0, 1.0]), emb([1.0, 0.0]))
        assert abs(value - 1.0 / math.sqrt(2.0)) < 1e-9

    def test_symmetry_and_scale_invariance(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            a = emb(rng.normal(size=8), "a")
            b = emb(rng.normal(size=8), "b")
            c = float(rng.uniform(0.1, 10.0))
            assert cosine_similarity(a, b) == cosine_similarity(b, a)
            assert abs(cosine_similarity(a, emb(c * b.vector)) - cosine_similarity(a, b)) < 1e-12

    def test_zero_vector(self):
        with pytest.raises(ZeroVectorError):
            cosine_similarity(emb([0.0, 0.0]), emb([1.0, 0.0]))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            cosine_similarity(emb([1.0]), emb([1.0, 2.0]))

    def test_clamped_range(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            a = emb(rng.normal(size=4))
            b = emb(rng.normal(size=4))
            assert -1.0 <= cosine_similarity(a, b) <= 1.0


class TestThreshold:
    def test_ten_even_impostors(self):
        impostors = [0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95]
        thr = compute_threshold_at_fmr(ScoreSet(genuine=[1.0], impostor=impostors), 0.10)
        assert thr.value == 0.95
        assert thr.achieved_fmr == 0.10

    def test_all_ties_fall_back_to_plus_one(self):
        scores = ScoreSet(genuine=[1.0], impostor=[0.5] * 8)
        thr = compute_threshold_at_fmr(scores, 0.10)
        assert thr.value == 1.0
        assert thr.achieved_fmr == 0.0

    def test_single_impostor(self):
        scores = ScoreSet(genuine=[1.0], impostor=[0.2])
        thr = compute_threshold_at_fmr(scores, 0.5)
        # the only candidate 0.2 has FMR 1.0 > 0.5, so +1 wins
        assert thr.value == 1.0
        assert thr.achieved_fmr == 0.0

    def test_empty_impostors(self):
        with pytest.raises(EmptyImpostorSetError):
            compute_threshold_at_fmr(ScoreSet(genuine=[1.0]), 0.1)

    def test_bad_target(self):
        scores = ScoreSet(genuine=[1.0], impostor=[0.1])
        for bad in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(ValidationError):
                compute_threshold_at_fmr(scores, bad)

    @given(
        st.lists(
            st.floats(min_value=-1.0, max_value=1.0, allow_nan=False), min_size=1, max_size=80
        ),
        st.floats(min_value=0.01, max_value=0.99, allow_nan=False),
    )
    @settings(max_examples=150, deadline=None)
    def test_matches_bruteforce(self, impostors, target):
        thr = compute_threshold_at_fmr(ScoreSet(genuine=[0.0], impostor=impostors), target)
        expected_value, expected_fmr = threshold_reference(impostors, target)
        assert thr.value == expected_value
        assert thr.achieved_fmr == expected_fmr
        assert thr.achieved_fmr <= target

    def test_ties_counted_exactly(self):
        impostors = [0.3, 0.3, 0.3, 0.7, 0.7, 0.9]
        thr = compute_threshold_at_fmr(ScoreSet(genuine=[1.0], impostor=impostors), 0.34)
        value, fmr = threshold_reference(impostors, 0.34)
        assert (thr.value, thr.achieved_fmr) == (value, fmr)

    def test_monotone_in_target(self):
        rng = np.random.default_rng(2)
        impostors = list(rng.uniform(-1, 1, size=60))
        scores = ScoreSet(genuine=[0.0], impostor=impostors)
        previous = None
        for target in (0.05, 0.1, 0.2, 0.4, 0.8):
            thr = compute_threshold_at_fmr(scores, target)
            if previous is not None:
                assert thr.value <= previous  # looser target never raises the threshold
            previous = thr.value


class TestTmr:
    def test_two_of_three(self):
        scores = ScoreSet(genuine=[0.9, 0.8, 0.2], impostor=[0.0])
        value = tmr(scores, MatchThreshold(0.5, 0.0, 0.1))
        assert abs(value - 2.0 / 3.0) < 1e-9

    def test_perfect_genuines(self):
        scores = ScoreSet(genuine=[1.0, 1.0], impostor=[0.0])
        assert tmr(scores, MatchThreshold(1.0, 0.0, 0.1)) == 1.0

    def test_all_below(self):
        scores = ScoreSet(genuine=[0.1, 0.2], impostor=[0.0])
        assert tmr(scores, MatchThreshold(0.5, 0.0, 0.1)) == 0.0

    def test_empty_genuine(self):
        with pytest.raises(EmptyGenuineSetError):
            tmr(ScoreSet(impostor=[0.1]), MatchThreshold(0.5, 0.0, 0.1))

    def test_monotone_in_threshold(self):
        rng = np.random.default_rng(3)
        scores = ScoreSet(genuine=list(rng.uniform(-1, 1, 50)), impostor=[0.0])
        values = [
            tmr(scores, MatchThreshold(t, 0.0, 0.1)) for t in np.linspace(-1.0, 1.0, 21)
        ]
        assert all(a >= b for a, b in zip(values, values[1:]))


class TestImpostorScore:
    def test_self_in_gallery(self):
        out = emb([1.0, 0.0], "out")
        gallery = [emb([1.0, 0.0], "g1"), emb([0.0, 1.0], "g2")]
        assert impostor_score_for_output(out, gallery, set()) == 1.0

    def test_exclusion_forces_second(self):
        out = emb([1.0, 0.0], "out")
        gallery = [emb([1.0, 0.0], "g1"), emb([0.0, 1.0], "g2")]
        assert impostor_score_for_output(out, gallery, {"g1"}) == 0.0

    def test_second_highest_by_exhaustive_scan(self):
        rng = np.random.default_rng(4)
        out = emb(rng.normal(size=6), "out")
        gallery = [emb(rng.normal(size=6), f"g{k}") for k in range(10)]
        sims = {g.id: cosine_similarity(out, g) for g in gallery}
        best = max(sims, key=sims.get)
        expected = max(v for k, v in sims.items() if k != best)
        assert impostor_score_for_output(out, gallery, {best}) == expected

    def test_empty_after_exclusion(self):
        out = emb([1.0, 0.0], "out")
        with pytest.raises(EmptyGalleryAfterExclusionError):
            impostor_score_for_output(out, [emb([1.0, 1.0], "g1")], {"g1"})


class TestRestorationAccuracy:
    def test_perfect(self):
        assert restoration_accuracy([(1.0, 1.0)] * 5, 0.4) == 1.0

    def test_half(self):
        assert restoration_accuracy([(0.5, 0.3), (0.5, 0.5)], 0.4) == 0.5

    def test_boundary_is_strict(self):
        assert restoration_accuracy([(0.4, 0.9)], 0.4) == 0.0

    def test_tau_below_all_scores(self):
        rng = np.random.default_rng(5)
        records = [tuple(rng.uniform(-0.99, 1.0, 2)) for _ in range(30)]
        assert restoration_accuracy(records, -1.0) == 1.0

    def test_empty(self):
        with pytest.raises(EmptyRecordSetError):
            restoration_accuracy([], 0.4)


class TestScoreSetCsv:
    def test_round_trip_precision(self, tmp_path):
        scores = ScoreSet(genuine=[0.123456789, 1.0, -0.5], impostor=[0.987654321e-3])
        path = tmp_path / "scores.csv"
        scores.to_csv(path)
        text = path.read_text().splitlines()
        assert text[0] == "label,score"
        back = ScoreSet.from_csv(path)
        assert back.genuine == scores.genuine
        assert back.impostor == scores.impostor

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("score,label\n")
        with pytest.raises(ValidationError):
            ScoreSet.from_csv(path)

    def test_bad_label(self, tmp_path):
        path = tmp_path / "bad2.csv"
        path.write_text("label,score\nunknown,0.5\n")
        with pytest.raises(ValidationError):
            ScoreSet.from_csv(path)
