"""Integrated-gradients pixel attribution for the tappable-class logit.

Attribution targets the pre-softmax logit. The path runs over the RGB
channels only; the mask channel is the query, stays fixed along the path,
and is excluded from the reported attribution. Path integration uses the
Riemann midpoint rule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from .inputs import ModelInput
from .net import TapNet

TAPPABLE_CLASS = 1


class AttributionError(RuntimeError):
    pass


@dataclass
class PixelAttribution:
    """Per-pixel attribution, summed over the RGB channels (mask excluded)."""

    values: np.ndarray  # (H, W) float32
    target_class: int = TAPPABLE_CLASS


def make_baseline(encoded: ModelInput, value: float) -> ModelInput:
    """Constant-RGB baseline sharing the input's mask channel."""
    tensor = encoded.tensor.copy()
    tensor[:, :, :3] = value
    return ModelInput(tensor=tensor, transform=encoded.transform)


def _chw(encoded: ModelInput) -> torch.Tensor:
    return torch.from_numpy(np.ascontiguousarray(encoded.tensor.transpose(2, 0, 1)))


def target_logit(model: TapNet, encoded: ModelInput, target_class: int = TAPPABLE_CLASS) -> float:
    model.eval()
    with torch.no_grad():
        return model(_chw(encoded)[None])[0, target_class].item()


def integrated_gradients(
    model: TapNet,
    encoded: ModelInput,
    baseline: ModelInput,
    steps: int = 128,
    target_class: int = TAPPABLE_CLASS,
    batch_size: int = 32,
) -> PixelAttribution:
    """attribution = (x - x') * mean of dF/dx along the midpoint path x' + a(x - x')."""
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if encoded.tensor.shape != baseline.tensor.shape:
        raise ValueError("baseline shape must match input shape")
    if not np.array_equal(encoded.mask, baseline.mask):
        raise ValueError("baseline mask channel must equal the input's mask channel")

    model.eval()
    x = _chw(encoded)
    b = _chw(baseline)
    diff = x - b
    alphas = (torch.arange(steps, dtype=torch.float32) + 0.5) / steps

    grad_sum = torch.zeros_like(x)
    for start in range(0, steps, batch_size):
        a = alphas[start : start + batch_size].view(-1, 1, 1, 1)
        points = (b[None] + a * diff[None]).requires_grad_(True)
        logits = model(points)
        score = logits[:, target_class].sum()
        (grad,) = torch.autograd.grad(score, points)
        if not torch.isfinite(grad).all():
            raise AttributionError("non-finite gradients along the integration path")
        grad_sum += grad.sum(dim=0)

    attr = (diff * grad_sum / steps).numpy()
    # report RGB only; the mask channel carries no path difference anyway
    values = attr[:3].sum(axis=0).astype(np.float32)
    return PixelAttribution(values=values, target_class=target_class)


def completeness_gap(
    model: TapNet,
    encoded: ModelInput,
    baseline: ModelInput,
    attribution: PixelAttribution,
) -> tuple[float, float]:
    """(sum of attributions - logit gap, logit gap); both on the target class."""
    gap = target_logit(model, encoded, attribution.target_class) - target_logit(
        model, baseline, attribution.target_class
    )
    return float(attribution.values.sum() - gap), float(gap)


def dual_baseline_attribution(
    model: TapNet,
    encoded: ModelInput,
    steps: int = 128,
    target_class: int = TAPPABLE_CLASS,
    batch_size: int = 32,
) -> PixelAttribution:
    """Mean of integrated gradients from the all-black and all-white RGB baselines."""
    black = integrated_gradients(
        model, encoded, make_baseline(encoded, 0.0), steps, target_class, batch_size
    )
    white = integrated_gradients(
        model, encoded, make_baseline(encoded, 1.0), steps, target_class, batch_size
    )
    return PixelAttribution(
        values=(black.values + white.values) / 2.0, target_class=target_class
    )
