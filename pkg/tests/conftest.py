import pytest
import torch

from spgan.datagen import PhantomSpec, generate_corpus
from spgan.trainer import build_schedule, run_phases

torch.set_num_threads(1)

MICRO_OVERRIDES = {
    "epochs_phase1": "6",
    "epochs_phase2": "2",
    "epochs_phase3": "2",
    "epochs_phase4": "4",
    "gen_channels": "12",
    "disc_channels": "8",
    "num_residual_blocks": "1",
}


@pytest.fixture(scope="session")
def micro_corpus(tmp_path_factory):
    path = tmp_path_factory.mktemp("micro_corpus")
    generate_corpus(6, PhantomSpec(seed=0, resolution=128), path)
    return path


@pytest.fixture(scope="session")
def micro_schedule():
    return build_schedule("desk", overrides=dict(MICRO_OVERRIDES))


@pytest.fixture(scope="session")
def micro_run(micro_corpus, micro_schedule, tmp_path_factory):
    """A complete (tiny) 4-phase run shared across test modules."""
    out = tmp_path_factory.mktemp("micro_run")
    result = run_phases(micro_corpus, micro_schedule, out)
    return {
        "corpus": micro_corpus,
        "schedule": micro_schedule,
        "out": out,
        "result": result,
    }
