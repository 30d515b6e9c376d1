import pytest
import torch

from stagescore.data import SynthSpec, generate_synthetic_dataset
from stagescore.engine import TrainConfig

torch.set_num_threads(2)


def tiny_synth_spec(**overrides) -> SynthSpec:
    base = dict(
        num_videos=12,
        num_classes=2,
        seed=7,
        num_frames=24,
        height=16,
        width=16,
        test_fraction=0.25,
    )
    base.update(overrides)
    return SynthSpec(**base)


def tiny_train_config(**overrides) -> TrainConfig:
    base = dict(
        epochs=2,
        batch_size=2,
        seed=3,
        frames=24,
        num_stages=3,
        resample_size=6,
        min_gap=4,
        backbone_widths=(4, 8),
        backbone_gate_shift=(True, True),
        gru_hidden=8,
        decoder_blocks=1,
        decoder_heads=2,
        regressor_hidden=(16, 8),
        num_exemplars=3,
    )
    base.update(overrides)
    return TrainConfig(**base)


@pytest.fixture(scope="session")
def tiny_dataset():
    return generate_synthetic_dataset(tiny_synth_spec())


@pytest.fixture(scope="session")
def tiny_config():
    return tiny_train_config()
