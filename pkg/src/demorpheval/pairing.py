"""Evaluation core for one demorphing output pair: output-to-ground-truth
pairing, paired IQA, the biometrically cross-weighted IQA term, and the
dissimilarity/alignment condition checks.

Grid convention used throughout: ``b_jk``/``iqa_jk`` is the score between
demorpher output ``o_j`` and ground truth ``i_k``.  Arguments are passed
diagonal first (11, 22) then anti-diagonal (12, 21).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .biometric import cosine_similarity
from .dataset import EmbeddingStore, MorphRecord
from .errors import DimensionMismatchError
from .images import ImageBuffer, load_image
from .iqa import IqaKind, SsimParams, cap_psnr, psnr, ssim

STRAIGHT = "straight"  # o1<->i1, o2<->i2
CROSSED = "crossed"  # o1<->i2, o2<->i1


@dataclass(frozen=True)
class DemorphEvaluation:
    """Full per-morph evaluation: score grids plus every derived metric."""

    morph_id: str
    pairing: str
    b_scores: Mapping[str, float]  # keys o1_i1, o1_i2, o2_i1, o2_i2
    b_o1_o2: float
    iqa_scores: Mapping[str, Mapping[str, float]]  # per IqaKind value
    paired_iqa: Mapping[str, float]
    bw: Mapping[str, float]
    matched_scores: tuple[float, float]
    ra_pass: bool
    conditions: Mapping[str, bool] | None

    def to_dict(self) -> dict:
        return {
            "morph_id": self.morph_id,
            "pairing": self.pairing,
            "b_scores": dict(self.b_scores),
            "b_o1_o2": self.b_o1_o2,
            "iqa_scores": {k: dict(v) for k, v in self.iqa_scores.items()},
            "paired_iqa": dict(self.paired_iqa),
            "bw": dict(self.bw),
            "matched_scores": list(self.matched_scores),
            "ra_pass": self.ra_pass,
            "conditions": dict(self.conditions) if self.conditions is not None else None,
        }


def resolve_pairing(b11: float, b22: float, b12: float, b21: float) -> str:
    """Pick the output/ground-truth pairing with the larger similarity sum.

    Ties resolve to the straight pairing.
    """
    return STRAIGHT if b11 + b22 >= b12 + b21 else CROSSED


def paired_iqa(iqa11: float, iqa22: float, iqa12: float, iqa21: float) -> float:
    """Half the larger of the two pairing sums of IQA values."""
    return 0.5 * max(iqa11 + iqa22, iqa12 + iqa21)


def bw_iqa(
    b11: float,
    b22: float,
    b12: float,
    b21: float,
    iqa11: float,
    iqa22: float,
    iqa12: float,
    iqa21: float,
) -> float:
    """Per-morph biometrically cross-weighted IQA term.

    Each candidate pairing's IQA values are weighted by the matching
    biometric scores; the better pairing wins.  Callers clamp biometric
    weights to [0, 1] first (see ``clamp_weight``); the dataset-level
    metric is the mean of this term over morphs.
    """
    return max(b11 * iqa11 + b22 * iqa22, b12 * iqa12 + b21 * iqa21)


def clamp_weight(b: float) -> float:
    """Clamp a cosine score to [0, 1] for use as a BW weight."""
    return max(0.0, min(1.0, b))


def check_demorph_conditions(
    b_o1_o2: float,
    b11: float,
    b22: float,
    b12: float,
    b21: float,
    theta: float,
    epsilon: float,
) -> tuple[bool, bool]:
    """Output-dissimilarity and ground-truth-alignment diagnostics.

    dissimilar: the two outputs score below theta against each other
    (guards against morph replication).  aligned: every output matches at
    least one ground truth above epsilon.
    """
    dissimilar = b_o1_o2 < theta
    aligned = min(max(b11, b12), max(b21, b22)) > epsilon
    return dissimilar, aligned


def evaluate_record(
    record: MorphRecord,
    embeddings: EmbeddingStore,
    iqa_kinds: frozenset[IqaKind] | set[IqaKind] = frozenset(IqaKind),
    tau: float = 0.4,
    theta: float | None = None,
    epsilon: float | None = None,
    ssim_params: SsimParams = SsimParams(),
    allow_negative_b: bool = False,
) -> DemorphEvaluation:
    """Score one morph record end to end.

    Images are loaded from the record's paths; embeddings are looked up
    by morph_id, the ground-truth ids, and the output files' stems.
    Condition flags are computed only when both theta and epsilon are
    given.
    """
    x = load_image(record.morph_path)
    i1 = load_image(record.gt1_path)
    i2 = load_image(record.gt2_path)
    o1 = load_image(record.out1_path)
    o2 = load_image(record.out2_path)
    shapes = {img.pixels.shape for img in (x, i1, i2, o1, o2)}
    if len(shapes) != 1:
        raise DimensionMismatchError(
            f"record {record.morph_id}: images disagree on dimensions {sorted(shapes)}"
        )

    embeddings.get(record.morph_id)  # morph embedding must exist for the record to be valid
    e_i1 = embeddings.get(record.gt1_id)
    e_i2 = embeddings.get(record.gt2_id)
    e_o1 = embeddings.get(Path(record.out1_path).stem)
    e_o2 = embeddings.get(Path(record.out2_path).stem)

    b = {
        "o1_i1": cosine_similarity(e_o1, e_i1),
        "o1_i2": cosine_similarity(e_o1, e_i2),
        "o2_i1": cosine_similarity(e_o2, e_i1),
        "o2_i2": cosine_similarity(e_o2, e_i2),
    }
    b_o1_o2 = cosine_similarity(e_o1, e_o2)

    def iqa_grid(kind: IqaKind) -> dict[str, float]:
        def score(o: ImageBuffer, i: ImageBuffer) -> float:
            if kind is IqaKind.SSIM:
                return ssim(o, i, ssim_params)
            return cap_psnr(psnr(o, i))

        return {
            "o1_i1": score(o1, i1),
            "o1_i2": score(o1, i2),
            "o2_i1": score(o2, i1),
            "o2_i2": score(o2, i2),
        }

    grids = {kind.value: iqa_grid(kind) for kind in sorted(iqa_kinds, key=lambda k: k.value)}

    pairing = resolve_pairing(b["o1_i1"], b["o2_i2"], b["o1_i2"], b["o2_i1"])
    weight = (lambda v: v) if allow_negative_b else clamp_weight
    paired = {
        kind: paired_iqa(g["o1_i1"], g["o2_i2"], g["o1_i2"], g["o2_i1"])
        for kind, g in grids.items()
    }
    bw = {
        kind: bw_iqa(
            weight(b["o1_i1"]),
            weight(b["o2_i2"]),
            weight(b["o1_i2"]),
            weight(b["o2_i1"]),
            g["o1_i1"],
            g["o2_i2"],
            g["o1_i2"],
            g["o2_i1"],
        )
        for kind, g in grids.items()
    }

    if pairing == STRAIGHT:
        matched = (b["o1_i1"], b["o2_i2"])
    else:
        matched = (b["o1_i2"], b["o2_i1"])
    ra_pass = matched[0] > tau and matched[1] > tau

    conditions = None
    if theta is not None and epsilon is not None:
        dissimilar, aligned = check_demorph_conditions(
            b_o1_o2, b["o1_i1"], b["o2_i2"], b["o1_i2"], b["o2_i1"], theta, epsilon
        )
        conditions = {"dissimilar": dissimilar, "aligned": aligned}

    return DemorphEvaluation(
        morph_id=record.morph_id,
        pairing=pairing,
        b_scores=b,
        b_o1_o2=b_o1_o2,
        iqa_scores=grids,
        paired_iqa=paired,
        bw=bw,
        matched_scores=matched,
        ra_pass=ra_pass,
        conditions=conditions,
    )
