"""Batch CLI: evaluate manifests, calibrate thresholds, run the sanity
suite, classify scenario splits, and materialize baseline demorphers.

Exit codes: 0 success, 1 validation error, 2 IO error, 3 sanity
assertion failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .biometric import ScoreSet, compute_threshold_at_fmr
from .dataset import (
    ScenarioSplit,
    classify_scenario,
    load_embedding_store,
    parse_manifest,
    read_id_list,
)
from .errors import DemorphEvalError, SanityCheckError
from .harness import (
    DEFAULT_SANITY_SEED,
    emit_report,
    materialize_baseline,
    run_evaluation,
    sanity_suite,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_SANITY = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="demorpheval",
        description="Evaluation metrics for reference-free face demorphing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("evaluate", help="run the full metric stack over a manifest")
    p_eval.add_argument("--manifest", required=True)
    p_eval.add_argument("--embeddings", required=True, help="BEMB store path")
    p_eval.add_argument("--gallery", help="optional larger BEMB gallery for impostor mining")
    p_eval.add_argument("--fmr", type=float, default=0.10)
    p_eval.add_argument("--tau", type=float, default=0.4)
    p_eval.add_argument("--theta", type=float, default=None)
    p_eval.add_argument("--epsilon", type=float, default=None)
    p_eval.add_argument("--format", choices=["json", "csv", "markdown"], default="json")
    p_eval.add_argument("--out", required=True)
    p_eval.add_argument("--records-out", default=None)
    p_eval.add_argument("--skip-bad-records", action="store_true")
    p_eval.add_argument("--bw-normalize", action="store_true",
                        help="add BW/2 columns (not part of the metric definition)")
    p_eval.add_argument("--allow-negative-b", action="store_true")
    p_eval.add_argument("--threads", type=int, default=1)
    p_eval.add_argument("--dataset-name", default=None,
                        help="report label (defaults to the manifest file stem)")

    p_thr = sub.add_parser("threshold", help="calibrate a threshold from a score CSV")
    p_thr.add_argument("--scores", required=True, help="CSV with label,score rows")
    p_thr.add_argument("--fmr", type=float, default=0.10)

    p_san = sub.add_parser("sanity", help="run the SSIM-vs-BW crossover sanity suite")
    p_san.add_argument("--seed", type=int, default=DEFAULT_SANITY_SEED)
    p_san.add_argument("--out", required=True, help="directory for the sanity report")

    p_val = sub.add_parser("validate-scenario", help="classify a train/test identity split")
    p_val.add_argument("--train", required=True, help="file with one train identity per line")
    p_val.add_argument("--test", required=True, help="file with one test identity per line")

    p_bas = sub.add_parser("demorph-baseline", help="materialize a baseline demorpher's outputs")
    p_bas.add_argument("--manifest", required=True)
    p_bas.add_argument("--kind", choices=["trivial", "oracle"], required=True)
    p_bas.add_argument("--out", required=True, help="output directory")

    return parser


def _cmd_evaluate(args: argparse.Namespace) -> int:
    records = parse_manifest(args.manifest)
    store = load_embedding_store(args.embeddings)
    gallery = load_embedding_store(args.gallery) if args.gallery else None
    dataset_name = args.dataset_name or Path(args.manifest).stem
    report, _, rejects = run_evaluation(
        records,
        store,
        gallery=gallery,
        dataset_name=dataset_name,
        fmr=args.fmr,
        tau=args.tau,
        theta=args.theta,
        epsilon=args.epsilon,
        allow_negative_b=args.allow_negative_b,
        bw_normalize=args.bw_normalize,
        skip_bad_records=args.skip_bad_records,
        threads=args.threads,
        records_out=args.records_out,
    )
    emit_report(report, args.format, args.out)
    print(f"wrote {args.format} report to {args.out} ({report.n_morphs} morphs"
          + (f", {len(rejects)} rejected" if rejects else "") + ")")
    return EXIT_OK


def _cmd_threshold(args: argparse.Namespace) -> int:
    scores = ScoreSet.from_csv(args.scores)
    threshold = compute_threshold_at_fmr(scores, args.fmr)
    print(f"threshold={threshold.value!r} achieved_fmr={threshold.achieved_fmr!r} "
          f"target_fmr={threshold.target_fmr!r}")
    return EXIT_OK


def _cmd_sanity(args: argparse.Namespace) -> int:
    result = sanity_suite(seed=args.seed, out_dir=args.out)
    print((Path(args.out) / "sanity_table.md").read_text(encoding="utf-8"))
    print(f"crossover at sigma {result['crossover_sigmas']}; report in {args.out}")
    return EXIT_OK


def _cmd_validate_scenario(args: argparse.Namespace) -> int:
    split = ScenarioSplit(
        train_identities=read_id_list(args.train),
        test_identities=read_id_list(args.test),
    )
    print(classify_scenario(split))
    return EXIT_OK


def _cmd_demorph_baseline(args: argparse.Namespace) -> int:
    records = parse_manifest(args.manifest)
    rewritten, manifest_path = materialize_baseline(records, args.kind, args.out)
    print(f"materialized {args.kind} outputs for {len(rewritten)} morphs; "
          f"manifest at {manifest_path}")
    return EXIT_OK


_COMMANDS = {
    "evaluate": _cmd_evaluate,
    "threshold": _cmd_threshold,
    "sanity": _cmd_sanity,
    "validate-scenario": _cmd_validate_scenario,
    "demorph-baseline": _cmd_demorph_baseline,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except SanityCheckError as exc:
        print(f"sanity check failed: {exc}", file=sys.stderr)
        return EXIT_SANITY
    except DemorphEvalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
