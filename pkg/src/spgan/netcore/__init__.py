"""Networks: generator, patch discriminator, fade-in blocks, checkpoints."""
from . import discriminator as _disc
from . import generator as _gen
from .blocks import (
    FadeInState,
    FibDown,
    FibUp,
    ResidualBlock,
    avg_pool_half,
    bilinear_double,
    fib_blend,
)
from .checkpoint import (
    CHECKPOINT_VERSION,
    CheckpointBundle,
    file_checksum,
    load_checkpoint,
    save_checkpoint,
    verify_checkpoint_file,
    weight_checksum,
)
from .discriminator import (
    ALPHA_MAX_D,
    DiscriminatorConfig,
    LayerPlan,
    PatchDiscriminator,
    patch_plan,
    receptive_field,
)
from .generator import ALPHA_MAX_G, Generator, GeneratorConfig

grow_generator = _gen.grow_to_high
grow_discriminator = _disc.grow_to_high

__all__ = [
    "ALPHA_MAX_D",
    "ALPHA_MAX_G",
    "CHECKPOINT_VERSION",
    "CheckpointBundle",
    "DiscriminatorConfig",
    "FadeInState",
    "FibDown",
    "FibUp",
    "Generator",
    "GeneratorConfig",
    "LayerPlan",
    "PatchDiscriminator",
    "ResidualBlock",
    "avg_pool_half",
    "bilinear_double",
    "fib_blend",
    "file_checksum",
    "grow_discriminator",
    "grow_generator",
    "load_checkpoint",
    "patch_plan",
    "receptive_field",
    "save_checkpoint",
    "verify_checkpoint_file",
    "weight_checksum",
]
