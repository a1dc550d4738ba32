"""U-Net generator and patch discriminator for paired image translation.

Layer stacks follow the standard translation recipe: 4x4 convs, stride-2
downsampling with capped channel doubling, mirrored decoder with skip
concatenation, and a patch discriminator whose default stack has a 70x70
receptive field. Images enter and leave in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import torch
import torch.nn as nn


class ShapeMismatchError(ValueError):
    pass


def _pow2_log(n):
    lg = int(round(math.log2(n)))
    if 2**lg != n:
        return None
    return lg


@dataclass(frozen=True)
class GeneratorConfig:
    ng: int = 64
    in_channels: int = 3
    out_channels: int = 3
    image_size: int = 256
    dropout_p: float = 0.5  # on the 3 innermost decoder stages

    def __post_init__(self):
        lg = _pow2_log(self.image_size)
        if lg is None or self.image_size < 64:
            raise ValueError(f"image_size must be a power of two >= 64, got {self.image_size}")
        if self.ng < 1:
            raise ValueError(f"ng must be >= 1, got {self.ng}")
        if not (0.0 <= self.dropout_p <= 1.0):
            raise ValueError(f"dropout_p must be in [0, 1], got {self.dropout_p}")

    @property
    def depth(self) -> int:
        # encoder stages; bottleneck sits at 2x2
        return _pow2_log(self.image_size) - 1

    def encoder_filters(self):
        return [min(8 * self.ng, self.ng * 2**i) for i in range(self.depth)]


@dataclass(frozen=True)
class DiscriminatorConfig:
    nd: int = 64
    in_channels: int = 6  # source and target, channel-concatenated
    n_strided: int = 3
    kernel: int = 4
    padding: int = 1  # 0 gives 'valid' patch arithmetic

    def __post_init__(self):
        if self.nd < 1 or self.n_strided < 1:
            raise ValueError("nd and n_strided must be >= 1")

    def layer_specs(self):
        """(kernel, stride, padding) per conv, input to output head."""
        specs = [(self.kernel, 2, self.padding)] * self.n_strided
        specs.append((self.kernel, 1, self.padding))
        specs.append((self.kernel, 1, self.padding))
        return specs


def receptive_field(layer_specs) -> int:
    """Input extent seen by one output unit: rf <- rf*s + (k - s), output first."""
    rf = 1
    for k, s, _ in reversed(list(layer_specs)):
        rf = rf * s + (k - s)
    return rf


def conv_output_size(layer_specs, n: int) -> int:
    """Spatial size after the stack, floor arithmetic per conv layer."""
    for k, s, p in layer_specs:
        n = (n + 2 * p - k) // s + 1
        if n < 1:
            raise ShapeMismatchError(f"input too small for stack (collapsed to {n})")
    return n


class SeededDropout(nn.Module):
    """Dropout that stays active for inference noise and accepts a generator.

    The generator makes translation reproducible for a fixed seed; when None,
    the global RNG is used (training path).
    """

    def __init__(self, p):
        super().__init__()
        self.p = p
        self.generator = None
        self.noise_enabled = True

    def forward(self, x):
        if not self.noise_enabled or self.p <= 0.0:
            return x
        keep = 1.0 - self.p
        mask = torch.rand(x.shape, generator=self.generator, dtype=x.dtype, device=x.device) < keep
        return x * mask.to(x.dtype) / keep


def init_weights(module, std=0.02, generator=None):
    """Zero-mean Gaussian init on conv weights, N(1, std) on norm gains."""
    for m in module.modules():
        if isinstance(m, (nn.Conv2d, nn.ConvTranspose2d)):
            with torch.no_grad():
                m.weight.normal_(0.0, std, generator=generator)
                if m.bias is not None:
                    m.bias.zero_()
        elif isinstance(m, nn.InstanceNorm2d) and m.affine:
            with torch.no_grad():
                m.weight.normal_(1.0, std, generator=generator)
                m.bias.zero_()


class UNetGenerator(nn.Module):
    """Encoder-decoder with skip connections; tanh output mapped to [0, 1]."""

    def __init__(self, cfg: GeneratorConfig):
        super().__init__()
        self.cfg = cfg
        filters = cfg.encoder_filters()
        self.encoders = nn.ModuleList()
        in_ch = cfg.in_channels
        for i, out_ch in enumerate(filters):
            block = [nn.Conv2d(in_ch, out_ch, 4, 2, 1)]
            if i > 0:
                block.append(nn.InstanceNorm2d(out_ch, affine=True))
            block.append(nn.LeakyReLU(0.2))
            self.encoders.append(nn.Sequential(*block))
            in_ch = out_ch

        self.decoders = nn.ModuleList()
        self.dropouts = nn.ModuleList()
        dec_in = filters[-1]
        for j in range(cfg.depth):
            last = j == cfg.depth - 1
            out_ch = cfg.out_channels if last else filters[cfg.depth - 2 - j]
            block = [nn.ConvTranspose2d(dec_in, out_ch, 4, 2, 1)]
            if not last:
                block.append(nn.InstanceNorm2d(out_ch, affine=True))
                block.append(nn.ReLU())
            self.decoders.append(nn.Sequential(*block))
            self.dropouts.append(SeededDropout(cfg.dropout_p if j < 3 and not last else 0.0))
            # next decoder consumes the skip concat
            dec_in = out_ch * 2 if not last else out_ch

    def set_noise(self, enabled: bool, generator=None):
        for d in self.dropouts:
            d.noise_enabled = enabled
            d.generator = generator

    def forward(self, x):
        b, c, h, w = x.shape
        if c != self.cfg.in_channels:
            raise ShapeMismatchError(
                f"encoder stage 0 expects {self.cfg.in_channels} channels, got {c}"
            )
        if h != self.cfg.image_size or w != self.cfg.image_size:
            raise ShapeMismatchError(
                f"encoder stage 0 expects {self.cfg.image_size}x{self.cfg.image_size}, got {h}x{w}"
            )
        y = x * 2.0 - 1.0
        skips = []
        for enc in self.encoders:
            y = enc(y)
            skips.append(y)
        for j, (dec, drop) in enumerate(zip(self.decoders, self.dropouts)):
            y = dec(y)
            y = drop(y)
            if j < self.cfg.depth - 1:
                skip = skips[self.cfg.depth - 2 - j]
                if skip.shape[2:] != y.shape[2:]:
                    raise ShapeMismatchError(
                        f"decoder stage {j}: skip {tuple(skip.shape[2:])} vs up {tuple(y.shape[2:])}"
                    )
                y = torch.cat([y, skip], dim=1)
        return (torch.tanh(y) + 1.0) / 2.0


class PatchDiscriminator(nn.Module):
    """Conditional patch discriminator over channel-concatenated (src, tgt)."""

    def __init__(self, cfg: DiscriminatorConfig):
        super().__init__()
        self.cfg = cfg
        k, p = cfg.kernel, cfg.padding
        layers = []
        in_ch = cfg.in_channels
        out_ch = cfg.nd
        for i in range(cfg.n_strided):
            layers.append(nn.Conv2d(in_ch, out_ch, k, 2, p))
            if i > 0:
                layers.append(nn.InstanceNorm2d(out_ch, affine=True))
            layers.append(nn.LeakyReLU(0.2))
            in_ch = out_ch
            out_ch = min(8 * cfg.nd, out_ch * 2)
        layers.append(nn.Conv2d(in_ch, out_ch, k, 1, p))
        layers.append(nn.InstanceNorm2d(out_ch, affine=True))
        layers.append(nn.LeakyReLU(0.2))
        layers.append(nn.Conv2d(out_ch, 1, k, 1, p))
        self.net = nn.Sequential(*layers)

    def receptive_field(self) -> int:
        return receptive_field(self.cfg.layer_specs())

    def forward(self, src, tgt):
        if src.shape[2:] != tgt.shape[2:]:
            raise ShapeMismatchError(
                f"source {tuple(src.shape[2:])} and target {tuple(tgt.shape[2:])} spatial sizes differ"
            )
        x = torch.cat([src, tgt], dim=1) * 2.0 - 1.0
        return self.net(x)


def attach_finite_guard(module):
    """Debug aid: assert every submodule output is finite (NaN/Inf trips)."""

    def hook(mod, inputs, output):
        if isinstance(output, torch.Tensor) and not torch.isfinite(output).all():
            raise AssertionError(f"non-finite activation after {mod.__class__.__name__}")

    handles = [m.register_forward_hook(hook) for m in module.modules()]
    return handles
