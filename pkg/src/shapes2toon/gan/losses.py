"""Adversarial and reconstruction losses for the paired translation objective.

Discriminator loss is plain cross-entropy on real/fake logit grids; the
generator uses the non-saturating form. Everything is written with
log-sigmoid so logits up to |80| stay finite.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn.functional as F


@dataclass(frozen=True)
class LossWeights:
    lambda_l1: float = 100.0

    def __post_init__(self):
        if self.lambda_l1 < 0:
            raise ValueError(f"lambda_l1 must be nonnegative, got {self.lambda_l1}")


def _check_same_shape(a, b, what):
    if a.shape != b.shape:
        raise ValueError(f"{what}: shape mismatch {tuple(a.shape)} vs {tuple(b.shape)}")


def gan_loss(d_real: torch.Tensor, d_fake: torch.Tensor):
    """(loss_d, loss_g) from real/fake logit grids of equal shape.

    loss_d = -mean log sigmoid(d_real) - mean log(1 - sigmoid(d_fake));
    loss_g = -mean log sigmoid(d_fake)  (non-saturating generator form).
    """
    _check_same_shape(d_real, d_fake, "gan_loss")
    loss_d = -F.logsigmoid(d_real).mean() - F.logsigmoid(-d_fake).mean()
    loss_g = -F.logsigmoid(d_fake).mean()
    return loss_d, loss_g


def l1_loss(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    """Mean absolute difference over all elements."""
    _check_same_shape(a, b, "l1_loss")
    return (a - b).abs().mean()


def pix2pix_objective(d_fake_for_g: torch.Tensor, gen_out: torch.Tensor, target: torch.Tensor, w: LossWeights):
    """Generator objective: adversarial term plus lambda-weighted L1."""
    adv = -F.logsigmoid(d_fake_for_g).mean()
    return adv + w.lambda_l1 * l1_loss(gen_out, target)


def gradients(loss: torch.Tensor, params):
    """Gradients of ``loss`` for every parameter; unreachable ones get zeros.

    The graph is consumed: calling this twice on the same loss node raises,
    matching autograd's re-backward guard.
    """
    params = list(params)
    grads = torch.autograd.grad(loss, params, allow_unused=True)
    return [g if g is not None else torch.zeros_like(p) for g, p in zip(grads, params)]
