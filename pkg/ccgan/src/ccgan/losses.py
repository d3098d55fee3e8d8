"""Loss terms for the three trainers.

The adversarial game value is kept in its textbook probability form so it
can be checked by hand; the optimization path uses the numerically safe
logits formulation (BCE-with-logits, plus the non-saturating generator
objective). Reconstruction terms are plain L1 means. Totals are simple
fixed-weight sums, computed from the already-reduced components so a log
reader can re-add them and land on the identical float.
"""

from __future__ import annotations

import torch
import torch.nn.functional as F


def adversarial_value(real_probs: torch.Tensor, fake_probs: torch.Tensor) -> torch.Tensor:
    """E[log D(y)] + E[log(1 - D(G(x)))], on probabilities in (0, 1).

    This is the quantity the discriminator maximizes. Training code never
    evaluates it directly (log of a sigmoid underflows); it exists as the
    reference point the logits losses are checked against.
    """
    return torch.log(real_probs).mean() + torch.log(1.0 - fake_probs).mean()


def discriminator_loss(real_logits: torch.Tensor, fake_logits: torch.Tensor) -> torch.Tensor:
    """Negated game value in logits form: push real to 1, fake to 0."""
    real = F.binary_cross_entropy_with_logits(real_logits, torch.ones_like(real_logits))
    fake = F.binary_cross_entropy_with_logits(fake_logits, torch.zeros_like(fake_logits))
    return real + fake


def generator_adversarial_loss(fake_logits: torch.Tensor) -> torch.Tensor:
    """Non-saturating generator objective: -E[log D(G(x))].

    The minimax form E[log(1 - D(G(x)))] has a vanishing gradient exactly
    when the generator is losing, so the standard flipped-label surrogate
    is used for updates.
    """
    return F.binary_cross_entropy_with_logits(fake_logits, torch.ones_like(fake_logits))


def l1_loss(pred: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
    """Mean absolute deviation over every element."""
    return (pred - target).abs().mean()


def cycle_loss(reconstructed: torch.Tensor, original: torch.Tensor) -> torch.Tensor:
    """L1 between a round-tripped image and its source."""
    return l1_loss(reconstructed, original)


def classification_loss(domain_logits: torch.Tensor, domain_index: torch.Tensor) -> torch.Tensor:
    """Cross entropy of the discriminator's domain head."""
    return F.cross_entropy(domain_logits, domain_index)


# Totals operate on floats that have already been reduced and logged, so
# total == adversarial + weight * cycle holds bit-for-bit on the log.

def pix2pix_total(adversarial: float, l1: float) -> float:
    return adversarial + l1


def cyclegan_total(adversarial: float, cycle: float, cycle_weight: float = 10.0) -> float:
    return adversarial + cycle_weight * cycle


def stargan_total(adversarial: float, cycle: float, classification: float,
                  cycle_weight: float = 10.0, cls_weight: float = 1.0) -> float:
    return adversarial + cycle_weight * cycle + cls_weight * classification
