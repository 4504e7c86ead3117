"""Orchestration: baseline demorphers, the end-to-end evaluation pipeline,
report emission, and the SSIM-vs-BW sanity suite.

Evaluation is embarrassingly parallel per record; results are reduced in
morph_id order, so the emitted canonical report is byte-identical for any
thread count.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .biometric import (
    Embedding,
    ScoreSet,
    compute_threshold_at_fmr,
    cosine_similarity,
    impostor_score_for_output,
    restoration_accuracy,
    tmr,
)
from .dataset import EmbeddingStore, MorphRecord, gallery_ids, write_manifest
from .errors import DemorphEvalError, EmptyRecordSetError, SanityCheckError, ValidationError
from .images import DegradationSpec, ImageBuffer, degrade, load_image, save_png
from .iqa import SsimParams, cap_psnr, psnr, ssim
from .pairing import DemorphEvaluation, clamp_weight, evaluate_record
from .synth import grid_embed, make_sanity_subjects

TRIVIAL = "trivial"
ORACLE = "oracle"

DEFAULT_SANITY_SIGMAS = tuple(range(10, 81, 10))
DEFAULT_SANITY_SEED = 0


def round_sig(value: float, digits: int = 9) -> float:
    """Round to a fixed number of significant digits (report canonical form)."""
    return float(f"{value:.{digits}g}")


def trivial_demorph(x: ImageBuffer) -> tuple[ImageBuffer, ImageBuffer]:
    """Degenerate demorpher: replicate the morph as both outputs."""
    return x, x


def oracle_demorph(record: MorphRecord) -> tuple[ImageBuffer, ImageBuffer]:
    """Upper-bound demorpher: return the ground-truth images themselves."""
    return load_image(record.gt1_path), load_image(record.gt2_path)


def materialize_baseline(
    records: list[MorphRecord], kind: str, out_dir: str | Path
) -> tuple[list[MorphRecord], Path]:
    """Write a baseline's outputs as PNG files and a rewritten manifest.

    trivial writes one file per morph and points both output paths at it;
    oracle writes per-output copies of the ground truths.
    """
    if kind not in (TRIVIAL, ORACLE):
        raise ValidationError(f"unknown baseline kind {kind!r}")
    out_dir = Path(out_dir)
    img_dir = out_dir / "outputs"
    img_dir.mkdir(parents=True, exist_ok=True)

    rewritten: list[MorphRecord] = []
    for rec in records:
        if kind == TRIVIAL:
            o1, _ = trivial_demorph(load_image(rec.morph_path))
            path = img_dir / f"{rec.morph_id}__trivial.png"
            save_png(o1, path)
            out1 = out2 = str(path)
        else:
            o1, o2 = oracle_demorph(rec)
            p1 = img_dir / f"{rec.morph_id}__o1.png"
            p2 = img_dir / f"{rec.morph_id}__o2.png"
            save_png(o1, p1)
            save_png(o2, p2)
            out1, out2 = str(p1), str(p2)
        rewritten.append(
            MorphRecord(
                morph_id=rec.morph_id,
                morph_path=rec.morph_path,
                gt1_id=rec.gt1_id,
                gt2_id=rec.gt2_id,
                gt1_path=rec.gt1_path,
                gt2_path=rec.gt2_path,
                out1_path=out1,
                out2_path=out2,
            )
        )
    manifest_path = out_dir / "manifest.jsonl"
    write_manifest(rewritten, manifest_path)
    return rewritten, manifest_path


@dataclass(frozen=True)
class MetricsReport:
    """Per-dataset aggregation mirroring the benchmark tables' columns."""

    dataset_name: str
    matcher_name: str
    n_morphs: int
    mean_psnr: float
    mean_ssim: float
    ra: float
    tmr_at_fmr: float
    target_fmr: float
    bw_ssim: float
    bw_psnr: float
    params: dict = field(default_factory=dict)
    bw_ssim_normalized: float | None = None  # BW/2; not part of the metric definition
    bw_psnr_normalized: float | None = None

    def to_dict(self) -> dict:
        out = {
            "dataset_name": self.dataset_name,
            "matcher_name": self.matcher_name,
            "n_morphs": self.n_morphs,
            "mean_psnr": self.mean_psnr,
            "mean_ssim": self.mean_ssim,
            "ra": self.ra,
            "tmr_at_fmr": self.tmr_at_fmr,
            "target_fmr": self.target_fmr,
            "bw_ssim": self.bw_ssim,
            "bw_psnr": self.bw_psnr,
            "params": self.params,
        }
        if self.bw_ssim_normalized is not None:
            out["bw_ssim_normalized"] = self.bw_ssim_normalized
            out["bw_psnr_normalized"] = self.bw_psnr_normalized
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "MetricsReport":
        return cls(
            dataset_name=data["dataset_name"],
            matcher_name=data["matcher_name"],
            n_morphs=data["n_morphs"],
            mean_psnr=data["mean_psnr"],
            mean_ssim=data["mean_ssim"],
            ra=data["ra"],
            tmr_at_fmr=data["tmr_at_fmr"],
            target_fmr=data["target_fmr"],
            bw_ssim=data["bw_ssim"],
            bw_psnr=data["bw_psnr"],
            params=data["params"],
            bw_ssim_normalized=data.get("bw_ssim_normalized"),
            bw_psnr_normalized=data.get("bw_psnr_normalized"),
        )


def run_evaluation(
    records: list[MorphRecord],
    store: EmbeddingStore,
    gallery: EmbeddingStore | None = None,
    dataset_name: str = "dataset",
    fmr: float = 0.10,
    tau: float = 0.4,
    theta: float | None = None,
    epsilon: float | None = None,
    ssim_params: SsimParams = SsimParams(),
    allow_negative_b: bool = False,
    bw_normalize: bool = False,
    skip_bad_records: bool = False,
    threads: int = 1,
    records_out: str | Path | None = None,
) -> tuple[MetricsReport, list[DemorphEvaluation], list[dict]]:
    """Evaluate a manifest end to end and assemble the aggregate report.

    Genuine scores are the two matched-pair similarities per morph;
    impostor scores are each output's best match in the gallery with that
    morph's ground truths excluded.  The gallery defaults to the
    manifest's constituent embeddings.
    """
    if not records:
        raise EmptyRecordSetError("evaluation needs at least one manifest record")

    if gallery is None:
        gallery_entries = [store.get(gid) for gid in sorted(gallery_ids(records))]
    else:
        gallery_entries = [gallery.entries[gid] for gid in sorted(gallery.entries)]

    def evaluate_one(rec: MorphRecord) -> tuple[str, DemorphEvaluation | None, str | None]:
        try:
            ev = evaluate_record(
                rec,
                store,
                tau=tau,
                theta=theta,
                epsilon=epsilon,
                ssim_params=ssim_params,
                allow_negative_b=allow_negative_b,
            )
            return rec.morph_id, ev, None
        except (DemorphEvalError, OSError) as exc:
            if skip_bad_records:
                return rec.morph_id, None, f"{type(exc).__name__}: {exc}"
            raise DemorphEvalError(f"record {rec.morph_id!r} failed: {exc}") from exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(evaluate_one, records))
    else:
        outcomes = [evaluate_one(rec) for rec in records]

    rejects = [
        {"morph_id": morph_id, "error": err} for morph_id, _, err in outcomes if err is not None
    ]
    evals = sorted(
        (ev for _, ev, _ in outcomes if ev is not None), key=lambda ev: ev.morph_id
    )
    if not evals:
        raise EmptyRecordSetError("every record was rejected")

    by_id = {rec.morph_id: rec for rec in records}
    scores = ScoreSet()
    for ev in evals:
        rec = by_id[ev.morph_id]
        scores.genuine.extend(ev.matched_scores)
        excluded = {rec.gt1_id, rec.gt2_id}
        for out_path in (rec.out1_path, rec.out2_path):
            out_emb = store.get(Path(out_path).stem)
            scores.impostor.append(
                impostor_score_for_output(out_emb, gallery_entries, excluded)
            )

    threshold = compute_threshold_at_fmr(scores, fmr)
    tmr_value = tmr(scores, threshold)
    ra_value = restoration_accuracy([ev.matched_scores for ev in evals], tau)

    n = len(evals)
    mean_psnr = sum(ev.paired_iqa["psnr"] for ev in evals) / n
    mean_ssim = sum(ev.paired_iqa["ssim"] for ev in evals) / n
    bw_ssim = sum(ev.bw["ssim"] for ev in evals) / n
    bw_psnr = sum(ev.bw["psnr"] for ev in evals) / n

    params = {
        "tau": tau,
        "theta": theta,
        "epsilon": epsilon,
        "fmr": fmr,
        "threshold": round_sig(threshold.value),
        "achieved_fmr": round_sig(threshold.achieved_fmr),
        "allow_negative_b": allow_negative_b,
        "ssim": {
            "window_size": ssim_params.window_size,
            "gaussian_sigma": ssim_params.gaussian_sigma,
            "k1": ssim_params.k1,
            "k2": ssim_params.k2,
            "dynamic_range": ssim_params.dynamic_range,
        },
        "tmr_protocol": "pooled over two genuine samples per morph, shared threshold",
        "n_rejects": len(rejects),
    }
    report = MetricsReport(
        dataset_name=dataset_name,
        matcher_name=store.matcher_name,
        n_morphs=n,
        mean_psnr=round_sig(mean_psnr),
        mean_ssim=round_sig(mean_ssim),
        ra=round_sig(ra_value),
        tmr_at_fmr=round_sig(tmr_value),
        target_fmr=round_sig(fmr),
        bw_ssim=round_sig(bw_ssim),
        bw_psnr=round_sig(bw_psnr),
        params=params,
        bw_ssim_normalized=round_sig(bw_ssim / 2.0) if bw_normalize else None,
        bw_psnr_normalized=round_sig(bw_psnr / 2.0) if bw_normalize else None,
    )

    if records_out is not None:
        with open(records_out, "w", encoding="utf-8") as fh:
            for ev in evals:
                fh.write(json.dumps(ev.to_dict(), sort_keys=True) + "\n")
            if rejects:
                fh.write(json.dumps({"rejects": rejects}, sort_keys=True) + "\n")

    return report, evals, rejects


def render_report(report: MetricsReport, fmt: str) -> str:
    """Serialize a report as canonical JSON, CSV, or a markdown table."""
    if fmt == "json":
        return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        fields = [
            "dataset_name",
            "matcher_name",
            "n_morphs",
            "mean_psnr",
            "mean_ssim",
            "ra",
            "tmr_at_fmr",
            "target_fmr",
            "bw_ssim",
            "bw_psnr",
        ]
        values = [getattr(report, f) for f in fields]
        if report.bw_ssim_normalized is not None:
            fields += ["bw_ssim_normalized", "bw_psnr_normalized"]
            values += [report.bw_ssim_normalized, report.bw_psnr_normalized]
        return ",".join(fields) + "\n" + ",".join(repr(v) if isinstance(v, float) else str(v) for v in values) + "\n"
    if fmt == "markdown":
        header = (
            f"### {report.matcher_name} @ FMR {report.target_fmr:g}\n\n"
            "| Dataset | PSNR/SSIM | Rest. Acc | TMR@FMR | BW(SSIM) | BW(PSNR) |\n"
            "|---|---|---|---|---|---|\n"
        )
        row = (
            f"| {report.dataset_name} "
            f"| {report.mean_psnr:.2f}/{report.mean_ssim:.2f} "
            f"| {report.ra * 100:.2f}% "
            f"| {report.tmr_at_fmr * 100:.2f}% "
            f"| {report.bw_ssim:.2f} "
            f"| {report.bw_psnr:.2f} |\n"
        )
        return header + row
    raise ValidationError(f"unknown report format {fmt!r}")


def emit_report(report: MetricsReport, fmt: str, path: str | Path) -> str:
    """Write the rendered report to a file; returns the rendered text."""
    text = render_report(report, fmt)
    Path(path).write_text(text, encoding="utf-8")
    return text


def pair_bw_ssim(reference: ImageBuffer, candidate: ImageBuffer, epsilon: float,
                 ssim_params: SsimParams = SsimParams()) -> dict[str, float]:
    """Single-pair analogue of the cross-weighted metric used by the sanity
    suite: SSIM weighted by the biometric match score, zeroed when the
    alignment condition (score > epsilon) fails."""
    s = ssim(reference, candidate, ssim_params)
    b = clamp_weight(
        cosine_similarity(
            Embedding("ref", grid_embed(reference)), Embedding("cand", grid_embed(candidate))
        )
    )
    bw = b * s if b > epsilon else 0.0
    return {"ssim": s, "psnr": cap_psnr(psnr(reference, candidate)), "b": b, "bw_ssim": bw}


def sanity_suite(
    seed: int = DEFAULT_SANITY_SEED,
    out_dir: str | Path | None = None,
    epsilon: float = 0.3,
    sigmas: tuple[int, ...] = DEFAULT_SANITY_SIGMAS,
    size: int = 128,
    blur_sigma: float = 2.0,
) -> dict:
    """Replicate the identity-blindness demonstration on synthetic subjects.

    Builds a subject, a distinct-identity image, and noisy/blurred copies;
    sweeps the noise level and checks that some level makes plain SSIM
    prefer the different-subject image while the cross-weighted metric
    still prefers the noisy same-subject copy.  Raises SanityCheckError
    when no such level exists.
    """
    subject, other = make_sanity_subjects(seed, size=size)
    other_scores = pair_bw_ssim(subject, other, epsilon)
    blurred = degrade(subject, DegradationSpec("gaussian-blur", blur_sigma))
    blur_scores = pair_bw_ssim(subject, blurred, epsilon)

    rows = []
    crossover_sigmas = []
    for i, sigma in enumerate(sigmas):
        noisy = degrade(subject, DegradationSpec("gaussian-noise", float(sigma), seed=seed + 100 + i))
        noisy_scores = pair_bw_ssim(subject, noisy, epsilon)
        ssim_prefers_other = other_scores["ssim"] > noisy_scores["ssim"]
        bw_prefers_self = noisy_scores["bw_ssim"] > other_scores["bw_ssim"]
        if ssim_prefers_other and bw_prefers_self:
            crossover_sigmas.append(sigma)
        rows.append(
            {
                "sigma": sigma,
                **{f"noisy_{k}": round_sig(v) for k, v in noisy_scores.items()},
                "ssim_prefers_other": ssim_prefers_other,
                "bw_prefers_self": bw_prefers_self,
            }
        )

    result = {
        "seed": seed,
        "epsilon": epsilon,
        "image_size": size,
        "blur_sigma": blur_sigma,
        "other_subject": {k: round_sig(v) for k, v in other_scores.items()},
        "blurred_copy": {k: round_sig(v) for k, v in blur_scores.items()},
        "noise_sweep": rows,
        "crossover_sigmas": crossover_sigmas,
    }

    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "sanity_report.json").write_text(
            json.dumps(result, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
        (out_dir / "sanity_table.md").write_text(_sanity_table(result), encoding="utf-8")

    if not crossover_sigmas:
        raise SanityCheckError(
            "no noise level made SSIM prefer the different subject while "
            "BW(SSIM) preferred the noisy same-subject copy"
        )
    return result


def _sanity_table(result: dict) -> str:
    lines = [
        f"Sanity sweep (seed {result['seed']}, epsilon {result['epsilon']})",
        "",
        f"different-subject pair: SSIM {result['other_subject']['ssim']:.4f}, "
        f"B {result['other_subject']['b']:.4f}, BW(SSIM) {result['other_subject']['bw_ssim']:.4f}",
        f"blurred same-subject:   SSIM {result['blurred_copy']['ssim']:.4f}, "
        f"B {result['blurred_copy']['b']:.4f}, BW(SSIM) {result['blurred_copy']['bw_ssim']:.4f}",
        "",
        "| sigma | SSIM(noisy) | PSNR(noisy) | B(noisy) | BW(noisy) | SSIM prefers other | BW prefers self |",
        "|---|---|---|---|---|---|---|",
    ]
    for row in result["noise_sweep"]:
        lines.append(
            f"| {row['sigma']} | {row['noisy_ssim']:.4f} | {row['noisy_psnr']:.2f} "
            f"| {row['noisy_b']:.4f} | {row['noisy_bw_ssim']:.4f} "
            f"| {row['ssim_prefers_other']} | {row['bw_prefers_self']} |"
        )
    lines.append("")
    lines.append(f"crossover sigmas: {result['crossover_sigmas']}")
    lines.append("")
    return "\n".join(lines)
