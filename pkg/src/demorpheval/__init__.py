"""Evaluation metrics and benchmark harness for reference-free face demorphing.

Core surface:
    images     -- 8-bit buffers, PNG/BMP IO, morphing and degradations
    iqa        -- PSNR and Gaussian-windowed SSIM
    biometric  -- cosine matcher scores, FMR-calibrated thresholds, TMR, RA
    pairing    -- output/ground-truth pairing, paired IQA, cross-weighted IQA
    dataset    -- manifests, BEMB embedding stores, scenario classifier
    synth      -- grid embedder and synthetic texture-face benchmarks
    harness    -- baselines, end-to-end evaluation, reports, sanity suite
"""

from .biometric import (
    Embedding,
    MatchThreshold,
    ScoreSet,
    compute_threshold_at_fmr,
    cosine_similarity,
    impostor_score_for_output,
    restoration_accuracy,
    tmr,
)
from .dataset import (
    EmbeddingStore,
    MorphRecord,
    ScenarioSplit,
    classify_scenario,
    gallery_ids,
    load_embedding_store,
    parse_manifest,
    write_embedding_store,
    write_manifest,
)
from .harness import (
    MetricsReport,
    emit_report,
    materialize_baseline,
    oracle_demorph,
    run_evaluation,
    sanity_suite,
    trivial_demorph,
)
from .images import (
    DegradationSpec,
    ImageBuffer,
    alpha_blend_morph,
    degrade,
    load_image,
    save_png,
    to_luma,
)
from .iqa import IqaKind, SsimParams, cap_psnr, psnr, ssim
from .pairing import (
    DemorphEvaluation,
    bw_iqa,
    check_demorph_conditions,
    evaluate_record,
    paired_iqa,
    resolve_pairing,
)
from .synth import build_grid_store, grid_embed, make_benchmark

__version__ = "0.1.0"

__all__ = [
    "DegradationSpec",
    "DemorphEvaluation",
    "Embedding",
    "EmbeddingStore",
    "ImageBuffer",
    "IqaKind",
    "MatchThreshold",
    "MetricsReport",
    "MorphRecord",
    "ScenarioSplit",
    "ScoreSet",
    "SsimParams",
    "alpha_blend_morph",
    "build_grid_store",
    "bw_iqa",
    "cap_psnr",
    "check_demorph_conditions",
    "classify_scenario",
    "compute_threshold_at_fmr",
    "cosine_similarity",
    "degrade",
    "emit_report",
    "evaluate_record",
    "gallery_ids",
    "grid_embed",
    "impostor_score_for_output",
    "load_embedding_store",
    "load_image",
    "make_benchmark",
    "materialize_baseline",
    "oracle_demorph",
    "paired_iqa",
    "parse_manifest",
    "psnr",
    "resolve_pairing",
    "restoration_accuracy",
    "run_evaluation",
    "sanity_suite",
    "save_png",
    "ssim",
    "tmr",
    "to_luma",
    "trivial_demorph",
    "write_embedding_store",
    "write_manifest",
]
