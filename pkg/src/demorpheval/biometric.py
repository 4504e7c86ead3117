"""Identity-space scoring: cosine similarity over matcher embeddings,
genuine/impostor score sets, FMR-calibrated thresholds, TMR, and
Restoration Accuracy.

The face matcher is realized as cosine similarity over externally
supplied embeddings, so any embedding model can plug in via a store
file; the scoring itself stays free of ML runtimes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyGalleryAfterExclusionError,
    EmptyGenuineSetError,
    EmptyImpostorSetError,
    EmptyRecordSetError,
    ValidationError,
    ZeroVectorError,
)


@dataclass(frozen=True, eq=False)
class Embedding:
    """A matcher's output vector for one subject/image id."""

    id: str
    vector: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=np.float64)
        if v.ndim != 1 or v.size == 0:
            raise ValidationError(f"embedding {self.id!r}: vector must be 1-D and nonempty")
        object.__setattr__(self, "vector", v)
        v.setflags(write=False)


@dataclass
class ScoreSet:
    """Labeled similarity scores used for threshold calibration."""

    genuine: list[float] = field(default_factory=list)
    impostor: list[float] = field(default_factory=list)

    def to_csv(self, path: str | Path) -> None:
        """Write `label,score` rows; scores keep full round-trip precision."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("label,score\n")
            for s in self.genuine:
                fh.write(f"genuine,{s!r}\n")
            for s in self.impostor:
                fh.write(f"impostor,{s!r}\n")

    @classmethod
    def from_csv(cls, path: str | Path) -> "ScoreSet":
        scores = cls()
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != "label,score":
                raise ValidationError(f"{path}: expected header 'label,score', got {header!r}")
            for lineno, line in enumerate(fh, start=2):
                line = line.strip()
                if not line:
                    continue
                label, _, raw = line.partition(",")
                try:
                    value = float(raw)
                except ValueError as exc:
                    raise ValidationError(f"{path}:{lineno}: bad score {raw!r}") from exc
                if label == "genuine":
                    scores.genuine.append(value)
                elif label == "impostor":
                    scores.impostor.append(value)
                else:
                    raise ValidationError(f"{path}:{lineno}: unknown label {label!r}")
        return scores


@dataclass(frozen=True)
class MatchThreshold:
    """Decision threshold calibrated so achieved_fmr <= target_fmr."""

    value: float
    achieved_fmr: float
    target_fmr: float


def cosine_similarity(a: Embedding, b: Embedding) -> float:
    """Cosine similarity clamped to [-1, 1]; identical vectors score exactly 1."""
    if a.vector.shape != b.vector.shape:
        raise DimensionMismatchError(
            f"embedding dims differ: {a.vector.size} vs {b.vector.size}"
        )
    norm_a = float(np.linalg.norm(a.vector))
    norm_b = float(np.linalg.norm(b.vector))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroVectorError("cosine similarity undefined for an all-zero vector")
    if np.array_equal(a.vector, b.vector):
        return 1.0
    value = float(np.dot(a.vector, b.vector) / (norm_a * norm_b))
    return min(1.0, max(-1.0, value))


def compute_threshold_at_fmr(scores: ScoreSet, target_fmr: float) -> MatchThreshold:
    """Smallest threshold from {impostor scores} U {+1} whose FMR is <= target.

    Match rule is `score >= threshold`; ties among impostor scores are
    counted exactly.  When no impostor score qualifies, the +1 sentinel
    is returned: the no-acceptance operating point, reported as achieved
    FMR 0.
    """
    if not scores.impostor:
        raise EmptyImpostorSetError("threshold calibration needs impostor scores")
    if not 0.0 < target_fmr < 1.0:
        raise ValidationError(f"target_fmr must be in (0, 1), got {target_fmr}")
    imp = np.sort(np.asarray(scores.impostor, dtype=np.float64))
    n = imp.size
    # candidates ascending; FMR of candidate imp[i] is (n - first_index_of(imp[i])) / n
    values, first_idx = np.unique(imp, return_index=True)
    fmrs = (n - first_idx) / n
    feasible = np.nonzero(fmrs <= target_fmr)[0]
    if feasible.size == 0:
        return MatchThreshold(value=1.0, achieved_fmr=0.0, target_fmr=target_fmr)
    i = feasible[0]  # smallest qualifying threshold
    return MatchThreshold(
        value=float(values[i]), achieved_fmr=float(fmrs[i]), target_fmr=target_fmr
    )


def tmr(scores: ScoreSet, threshold: MatchThreshold) -> float:
    """Fraction of genuine scores at or above the threshold."""
    if not scores.genuine:
        raise EmptyGenuineSetError("TMR needs genuine scores")
    gen = np.asarray(scores.genuine, dtype=np.float64)
    return float(np.count_nonzero(gen >= threshold.value) / gen.size)


def impostor_score_for_output(
    output_emb: Embedding,
    gallery: Sequence[Embedding],
    excluded_ids: Iterable[str],
) -> float:
    """Best similarity against the gallery once the ground-truth ids are excluded."""
    excluded = set(excluded_ids)
    best = None
    for entry in gallery:
        if entry.id in excluded:
            continue
        s = cosine_similarity(output_emb, entry)
        if best is None or s > best:
            best = s
    if best is None:
        raise EmptyGalleryAfterExclusionError("gallery empty after exclusions")
    return best


def restoration_accuracy(records: Sequence[tuple[float, float]], tau: float) -> float:
    """Fraction of records whose both matched-pair scores strictly exceed tau."""
    if not records:
        raise EmptyRecordSetError("restoration accuracy needs at least one record")
    hits = sum(1 for s1, s2 in records if s1 > tau and s2 > tau)
    return hits / len(records)
