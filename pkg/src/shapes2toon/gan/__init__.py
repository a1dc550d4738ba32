from .nets import (
    GeneratorConfig,
    DiscriminatorConfig,
    ShapeMismatchError,
    UNetGenerator,
    PatchDiscriminator,
    SeededDropout,
    conv_output_size,
    receptive_field,
    init_weights,
)
from .losses import LossWeights, gan_loss, l1_loss, pix2pix_objective, gradients
from .checkpoint import save_checkpoint, load_checkpoint, CheckpointError

__all__ = [
    "GeneratorConfig",
    "DiscriminatorConfig",
    "ShapeMismatchError",
    "UNetGenerator",
    "PatchDiscriminator",
    "SeededDropout",
    "conv_output_size",
    "receptive_field",
    "init_weights",
    "LossWeights",
    "gan_loss",
    "l1_loss",
    "pix2pix_objective",
    "gradients",
    "save_checkpoint",
    "load_checkpoint",
    "CheckpointError",
]
