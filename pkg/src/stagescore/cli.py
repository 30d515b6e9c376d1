"""Command-line interface.

Exit codes: 0 success, 2 configuration error, 3 data/checkpoint error,
4 numeric failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .data import SynthSpec, generate_synthetic_dataset, load_dataset, save_dataset
from .engine import (
    TrainConfig,
    evaluate,
    infer_score,
    load_checkpoint,
    load_train_config,
    save_checkpoint,
    train,
)
from .engine.plots import plot_report
from .errors import (
    CheckpointError,
    ConfigurationError,
    DataError,
    NumericError,
    StageScoreError,
)
from .metrics import load_report, save_report

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stagescore",
        description="Stage-segmented contrastive score regression for action videos.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic dataset")
    gen.add_argument("--out", required=True, help="output dataset directory")
    gen.add_argument("--num-videos", type=int, required=True)
    gen.add_argument("--num-classes", type=int, required=True)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--frames", type=int, default=96)
    gen.add_argument("--stages", type=int, default=3)
    gen.add_argument("--noise-std", type=float, default=1.0)
    gen.add_argument("--test-fraction", type=float, default=0.2)

    tr = sub.add_parser("train", help="train a model")
    tr.add_argument("--data", required=True, help="dataset directory")
    tr.add_argument("--config", required=True, help="YAML training config")
    tr.add_argument("--out", required=True, help="checkpoint output path")
    tr.add_argument("--resume", default=None, help="checkpoint to warm-start from")

    ev = sub.add_parser("eval", help="evaluate a checkpoint on the test split")
    ev.add_argument("--data", required=True)
    ev.add_argument("--ckpt", required=True)
    ev.add_argument("--report", required=True, help="metrics report output path")
    ev.add_argument("--eval-seed", type=int, default=0)

    sc = sub.add_parser("score", help="score one video against training exemplars")
    sc.add_argument("--data", required=True)
    sc.add_argument("--ckpt", required=True)
    sc.add_argument("--video", required=True, help="video id")
    sc.add_argument("--exemplars", type=int, default=None, help="number of exemplars P")
    sc.add_argument("--seed", type=int, default=0)

    pl = sub.add_parser("plot", help="render figures from a metrics report")
    pl.add_argument("--report", required=True)
    pl.add_argument("--out", required=True, help="output directory for figures")
    return parser


def _cmd_gen(args) -> int:
    spec = SynthSpec(
        num_videos=args.num_videos,
        num_classes=args.num_classes,
        seed=args.seed,
        num_frames=args.frames,
        num_stages=args.stages,
        noise_std=args.noise_std,
        test_fraction=args.test_fraction,
    )
    dataset = generate_synthetic_dataset(spec)
    save_dataset(dataset, args.out)
    print(
        f"wrote {len(dataset.videos)} videos "
        f"({len(dataset.split.train)} train / {len(dataset.split.test)} test) to {args.out}"
    )
    return 0


def _cmd_train(args) -> int:
    dataset = load_dataset(args.data)
    config = load_train_config(args.config)
    resume = load_checkpoint(args.resume) if args.resume else None
    checkpoint, log = train(config, dataset, resume=resume, progress=True)
    save_checkpoint(args.out, checkpoint)
    last = log.records[-1]
    print(
        f"trained {checkpoint.step} steps; final losses "
        f"aqa {last.loss_aqa:.4f} ce {last.loss_ce:.4f} cont {last.loss_cont:.4f}; "
        f"checkpoint -> {args.out}"
    )
    return 0


def _cmd_eval(args) -> int:
    dataset = load_dataset(args.data)
    checkpoint = load_checkpoint(args.ckpt)
    model = checkpoint.restore_model()
    report = evaluate(model, checkpoint.config, dataset, eval_seed=args.eval_seed)
    save_report(report, args.report)
    srcc_txt = "n/a (degenerate)" if report.srcc is None else f"{report.srcc:.4f}"
    aiou_txt = " ".join(f"@{d}={v:.4f}" for d, v in sorted(report.aiou.items()))
    print(
        f"n={report.n} SRCC={srcc_txt} R-l2(x100)={report.r_l2_x100:.4f} "
        f"AIoU {aiou_txt}; report -> {args.report}"
    )
    return 0


def _cmd_score(args) -> int:
    dataset = load_dataset(args.data)
    checkpoint = load_checkpoint(args.ckpt)
    model = checkpoint.restore_model()
    video = dataset.video(args.video)
    rng = np.random.default_rng(args.seed)
    s_hat, details = infer_score(
        model, checkpoint.config, video, dataset, num_exemplars=args.exemplars, rng=rng
    )
    print(f"video {video.id} (class {video.class_code}) predicted score: {s_hat:.4f}")
    print(f"true score: {video.score:.4f}")
    print(f"predicted stage transitions: {list(details.boundaries.transitions)}")
    for ex_id, ex_score, rel in zip(
        details.exemplar_ids, details.exemplar_scores, details.relative_scores
    ):
        print(f"  exemplar {ex_id} score {ex_score:.4f} relative {rel:+.4f}")
    return 0


def _cmd_plot(args) -> int:
    report = load_report(args.report)
    for path in plot_report(report, args.out):
        print(f"wrote {path}")
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "train": _cmd_train,
    "eval": _cmd_eval,
    "score": _cmd_score,
    "plot": _cmd_plot,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, CheckpointError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except StageScoreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
