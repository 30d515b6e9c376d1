"""Synthetic multi-stage action video generator.

Each video shows a single moving blob. The motion regime (travel speed and
lateral oscillation amplitude) is constant within a stage and switches at the
sampled transition frames, mimicking the distinct phases of a scored athletic
action. Every class fixes an ideal per-stage parameter vector; a video's
quality score is the range maximum minus a penalty proportional to how far its
actual per-stage parameters deviate from the ideal. The blob is rendered with
motion blur (an anisotropic Gaussian stretched along the instantaneous
velocity), so the scored quantities are visible in per-frame appearance, not
just in absolute position.
"""

from __future__ import annotations

import numpy as np

from .types import (
    AnnotatedVideo,
    Dataset,
    Split,
    SynthSpec,
    transition_labels_from_stage_labels,
)

BLOB_SIGMA = 1.6  # isotropic blob stddev, pixels
BLUR_GAIN = 0.6  # adds BLUR_GAIN * v v^T to the blob covariance
OSC_PERIOD = 12.0  # frames per lateral oscillation cycle
EDGE_MARGIN = 5.0  # anchor path keeps this distance from the frame border
MIN_SPEED = 0.1  # pixels/frame; deviations are clipped to keep speed above this
SPEED_DEV_SCALE = 0.45  # stddev of speed deviations at noise_std = 1
AMP_DEV_SCALE = 1.1  # stddev of amplitude deviations at noise_std = 1


def score_from_deviations(deviations, penalty_weight, score_range) -> float:
    """Quality score: range max minus the summed per-stage deviation norms.

    ``deviations`` is [K_s, p]; every stage contributes its Euclidean
    deviation norm with equal weight, and the result is clipped into range.
    """
    devs = np.asarray(deviations, dtype=np.float64)
    penalty = penalty_weight * float(np.linalg.norm(devs, axis=1).sum())
    lo, hi = score_range
    return float(np.clip(hi - penalty, lo, hi))


def class_parameter_table(spec: SynthSpec, rng: np.random.Generator) -> dict:
    """Per-class ideal motion parameters: direction, speed, amplitude, color."""
    k = spec.num_stages
    table = {}
    for c in range(spec.num_classes):
        angles = rng.uniform(0.0, 2.0 * np.pi, size=k)
        table[f"cls{c:02d}"] = {
            "directions": np.stack([np.cos(angles), np.sin(angles)], axis=1),
            "speed": rng.uniform(1.2, 2.4, size=k),
            "amplitude": rng.uniform(1.5, 5.0, size=k),
            "color": rng.uniform(0.4, 1.0, size=spec.channels),
        }
    return table


def _stage_index_per_frame(transitions, num_frames) -> np.ndarray:
    labels = np.zeros(num_frames, dtype=np.int64)
    for t in transitions:
        labels[t:] += 1
    return labels


def _blob_track(spec, ideals, deviations, transitions, start, phase, rng=None):
    """Blob center per frame: a reflected anchor path plus lateral oscillation."""
    length = spec.num_frames
    stage_of = _stage_index_per_frame(transitions, length)
    speed = ideals["speed"] + deviations[:, 0]
    amplitude = ideals["amplitude"] + deviations[:, 1]
    dirs = ideals["directions"]

    lo = np.array([EDGE_MARGIN, EDGE_MARGIN])
    hi = np.array([spec.width - 1 - EDGE_MARGIN, spec.height - 1 - EDGE_MARGIN])
    span = hi - lo

    anchor = np.empty((length, 2))
    anchor[0] = start
    pos = start.copy()
    heading = 1.0  # flips on reflection so the path stays inside the margins
    for t in range(1, length):
        k = stage_of[t]
        pos = pos + heading * speed[k] * dirs[k]
        # Reflect into [lo, hi] (triangle-wave folding handles big overshoots).
        folded = np.abs(np.mod(pos - lo, 2.0 * span) - span)
        pos = hi - folded
        anchor[t] = pos

    omega = 2.0 * np.pi / OSC_PERIOD
    t_axis = np.arange(length)
    perp = np.stack([-dirs[:, 1], dirs[:, 0]], axis=1)
    osc = (amplitude[stage_of] * np.sin(omega * t_axis + phase))[:, None] * perp[stage_of]
    return anchor + osc


def _render_frames(centers, color, height, width) -> np.ndarray:
    """Anisotropic Gaussian blob per frame, stretched along its velocity."""
    length = centers.shape[0]
    vel = np.empty_like(centers)
    vel[1:-1] = (centers[2:] - centers[:-2]) / 2.0
    vel[0] = centers[1] - centers[0] if length > 1 else 0.0
    vel[-1] = centers[-1] - centers[-2] if length > 1 else 0.0

    # Covariance per frame: BLOB_SIGMA^2 I + BLUR_GAIN v v^T, inverted in closed form.
    vx, vy = vel[:, 0], vel[:, 1]
    s2 = BLOB_SIGMA**2
    a = s2 + BLUR_GAIN * vx * vx
    d = s2 + BLUR_GAIN * vy * vy
    b = BLUR_GAIN * vx * vy
    det = a * d - b * b
    ia, ib, id_ = d / det, -b / det, a / det

    xs = np.arange(width, dtype=np.float64)
    ys = np.arange(height, dtype=np.float64)
    dx = xs[None, None, :] - centers[:, 0][:, None, None]  # [L, 1, W]
    dy = ys[None, :, None] - centers[:, 1][:, None, None]  # [L, H, 1]
    quad = (
        ia[:, None, None] * dx * dx
        + 2.0 * ib[:, None, None] * dx * dy
        + id_[:, None, None] * dy * dy
    )
    blob = np.exp(-0.5 * quad)  # [L, H, W], peak 1 at the center
    frames = blob[:, None, :, :] * color[None, :, None, None]
    return frames.astype(np.float32)


def generate_synthetic_dataset(spec: SynthSpec) -> Dataset:
    """Generate a deterministic synthetic dataset from ``spec``.

    Videos are assigned to classes round-robin; within each class the trailing
    ``test_fraction`` of videos is held out, always leaving at least two
    training videos per class so pairs and exemplars exist.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    classes = class_parameter_table(spec, rng)
    windows = spec.resolved_windows()
    class_codes = sorted(classes)

    videos = []
    per_class_ids: dict[str, list[str]] = {code: [] for code in class_codes}
    for i in range(spec.num_videos):
        code = class_codes[i % spec.num_classes]
        ideals = classes[code]
        transitions = tuple(int(rng.integers(lo, hi)) for lo, hi in windows)
        raw = rng.normal(size=(spec.num_stages, 2))
        deviations = raw * np.array([SPEED_DEV_SCALE, AMP_DEV_SCALE]) * spec.noise_std
        # Keep the rendered motion physical; the score uses the clipped values.
        deviations[:, 0] = np.maximum(deviations[:, 0], MIN_SPEED - ideals["speed"])
        deviations[:, 1] = np.maximum(deviations[:, 1], -ideals["amplitude"])
        score = score_from_deviations(deviations, spec.penalty_weight, spec.score_range)

        start = rng.uniform(
            [EDGE_MARGIN, EDGE_MARGIN],
            [spec.width - 1 - EDGE_MARGIN, spec.height - 1 - EDGE_MARGIN],
        )
        phase = rng.uniform(0.0, 2.0 * np.pi)
        centers = _blob_track(spec, ideals, deviations, transitions, start, phase)
        frames = _render_frames(centers, ideals["color"], spec.height, spec.width)

        stage_labels = _stage_index_per_frame(transitions, spec.num_frames)
        video = AnnotatedVideo(
            id=f"v{i:04d}",
            frames=frames,
            class_code=code,
            score=score,
            stage_labels=stage_labels,
            transition_labels=transition_labels_from_stage_labels(stage_labels),
        )
        videos.append(video)
        per_class_ids[code].append(video.id)

    train_ids, test_ids = [], []
    for code in class_codes:
        ids = per_class_ids[code]
        n_test = min(int(len(ids) * spec.test_fraction), len(ids) - 2)
        n_test = max(n_test, 0)
        split_at = len(ids) - n_test
        train_ids.extend(ids[:split_at])
        test_ids.extend(ids[split_at:])

    return Dataset(
        videos=videos,
        score_range=spec.score_range,
        num_stages=spec.num_stages,
        split=Split(train=tuple(sorted(train_ids)), test=tuple(sorted(test_ids))),
    )
