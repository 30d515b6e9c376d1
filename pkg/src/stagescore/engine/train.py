"""Joint training: score regression + transition classification + stage
contrast, optimized with cosine-annealed Adam."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
import torch

from ..contrast import ContrastConfig, stage_contrastive_loss
from ..data import Dataset, PairSample, sample_training_pair
from ..errors import ConfigurationError, NumericError
from ..scorer import aqa_loss
from ..segmenter import (
    StageBoundaries,
    select_boundaries,
    partition_and_resample,
    segmentation_loss,
)
from .checkpoint import Checkpoint, apply_tensors, make_checkpoint
from .config import TrainConfig
from .model import StageScoreModel, build_model


def cosine_lr(step: int, total_steps: int, base_lr: float) -> float:
    """Cosine annealing from base_lr at step 0 to 0 at total_steps."""
    progress = min(max(step, 0), total_steps) / total_steps
    return base_lr * 0.5 * (1.0 + math.cos(math.pi * progress))


@dataclass(frozen=True)
class StepRecord:
    step: int
    loss_aqa: float
    loss_ce: float
    loss_cont: float
    loss_total: float
    lr: float
    wall_time: float


@dataclass
class TrainingLog:
    records: list[StepRecord] = field(default_factory=list)

    def totals(self) -> list[float]:
        return [r.loss_total for r in self.records]


def ground_truth_boundaries(video) -> StageBoundaries:
    return StageBoundaries.from_transition_labels(video.transition_labels)


def _frames_tensor(video) -> torch.Tensor:
    return torch.from_numpy(video.frames)


def pair_forward(
    model: StageScoreModel,
    pair: PairSample,
    config: TrainConfig,
    contrast_cfg: ContrastConfig,
    teacher_forcing: bool,
):
    """Losses for one (query, exemplar) pair.

    Returns (predicted_score_tensor, ce_term, contrast_term). The exemplar
    side contributes to the transition loss as well: both videos carry labels.
    """
    query, exemplar = pair.query, pair.exemplar
    stage_sets = {}
    ce_terms = []
    for key, video in (("q", query), ("e", exemplar)):
        feats = model.backbone(_frames_tensor(video))  # [L, D]
        probs = model.segmenter(feats)
        ce_terms.append(
            segmentation_loss(
                probs, video.transition_labels, balance_positive=config.balanced_transition_loss
            )
        )
        if teacher_forcing:
            bounds = ground_truth_boundaries(video)
        else:
            bounds = select_boundaries(probs, config.num_stages - 1, config.min_gap)
        stage_sets[key] = partition_and_resample(feats, bounds, config.resample_size)

    cont = stage_contrastive_loss(stage_sets["q"], stage_sets["e"], contrast_cfg)
    relative = torch.stack(
        [
            model.scorer.decoder(stage_sets["q"].per_stage[k], stage_sets["e"].per_stage[k])
            for k in range(config.num_stages)
        ]
    )
    s_rel = model.scorer.regressor(relative)
    predicted = exemplar.score + s_rel
    ce = (ce_terms[0] + ce_terms[1]) / 2.0
    return predicted, ce, cont


def _validate_dataset(config: TrainConfig, dataset: Dataset) -> None:
    if dataset.num_stages != config.num_stages:
        raise ConfigurationError(
            f"dataset has {dataset.num_stages} stages, config expects {config.num_stages}"
        )
    if not dataset.split.train:
        raise ConfigurationError("dataset has an empty train split")
    probe = dataset.video(dataset.split.train[0])
    if probe.num_frames != config.frames:
        raise ConfigurationError(
            f"dataset videos have {probe.num_frames} frames, config expects {config.frames}"
        )
    if probe.frames.shape[1] != config.in_channels:
        raise ConfigurationError(
            f"dataset videos have {probe.frames.shape[1]} channels, "
            f"config expects {config.in_channels}"
        )


def train(
    config: TrainConfig,
    dataset: Dataset,
    resume: Checkpoint | None = None,
    progress: bool = False,
) -> tuple[Checkpoint, TrainingLog]:
    """Run the full training loop; deterministic given config.seed."""
    _validate_dataset(config, dataset)
    torch.manual_seed(config.seed)
    rng = np.random.default_rng(config.seed)

    model = build_model(config)
    start_step = 0
    if resume is not None:
        apply_tensors(model, resume.tensors)
        torch.set_rng_state(torch.from_numpy(resume.torch_rng.astype(np.uint8)))
        if resume.numpy_rng is not None:
            rng.bit_generator.state = resume.numpy_rng
        start_step = resume.step

    steps_per_epoch = math.ceil(len(dataset.split.train) / config.batch_size)
    total_steps = config.epochs * steps_per_epoch
    if start_step >= total_steps:
        raise ConfigurationError(
            f"resume step {start_step} is beyond the schedule of {total_steps} steps"
        )
    optimizer = torch.optim.Adam(
        model.parameters(), lr=config.lr, betas=config.adam_betas, eps=config.adam_eps
    )
    contrast_cfg = ContrastConfig(tau=config.tau)
    log = TrainingLog()

    for step in range(start_step, total_steps):
        lr = cosine_lr(step, total_steps, config.lr)
        for group in optimizer.param_groups:
            group["lr"] = lr

        batch = [sample_training_pair(dataset, rng) for _ in range(config.batch_size)]
        optimizer.zero_grad()
        preds, trues, ce_terms, cont_terms = [], [], [], []
        for pair in batch:
            predicted, ce, cont = pair_forward(
                model, pair, config, contrast_cfg, config.teacher_forcing
            )
            preds.append(predicted)
            trues.append(pair.query.score)
            ce_terms.append(ce)
            cont_terms.append(cont)

        loss_aqa = aqa_loss(torch.tensor(trues, dtype=torch.float32), torch.stack(preds))
        loss_ce = torch.stack(ce_terms).mean()
        loss_cont = torch.stack(cont_terms).mean()
        total = (
            config.weight_aqa * loss_aqa
            + config.weight_ce * loss_ce
            + config.weight_cont * loss_cont
        )
        for name, value in (("aqa", loss_aqa), ("ce", loss_ce), ("cont", loss_cont)):
            if not torch.isfinite(value):
                raise NumericError(f"non-finite {name} loss at step {step}: {float(value)}")

        total.backward()
        if config.grad_clip is not None:
            torch.nn.utils.clip_grad_norm_(model.parameters(), config.grad_clip)
        optimizer.step()

        aqa_f = float(loss_aqa.detach())
        ce_f = float(loss_ce.detach())
        cont_f = float(loss_cont.detach())
        record = StepRecord(
            step=step,
            loss_aqa=aqa_f,
            loss_ce=ce_f,
            loss_cont=cont_f,
            loss_total=config.weight_aqa * aqa_f
            + config.weight_ce * ce_f
            + config.weight_cont * cont_f,
            lr=lr,
            wall_time=time.time(),
        )
        log.records.append(record)
        if progress and (step % steps_per_epoch == 0 or step == total_steps - 1):
            print(
                f"step {step}/{total_steps} lr {lr:.2e} "
                f"aqa {aqa_f:.4f} ce {ce_f:.4f} cont {cont_f:.4f}"
            )

    checkpoint = make_checkpoint(model, config, total_steps, rng.bit_generator.state)
    return checkpoint, log
