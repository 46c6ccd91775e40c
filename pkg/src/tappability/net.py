"""ResNet-18 tappability classifier with a 4-channel input stem.

The stock 18-layer residual network is modified to take the RGB+mask input;
the 512-d global-average-pooled feature before the 2-way head doubles as the
embedding used for nearest-neighbor retrieval.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
import torch.nn as nn
from torchvision.models import resnet18

from .data import BoundingBox, Screenshot
from .inputs import TARGET_H, TARGET_W, ModelInput, encode_input

EMBEDDING_DIM = 512
CHECKPOINT_SCHEMA = 1


@dataclass
class PredictionResult:
    tap_probability: float
    decision: bool
    embedding: np.ndarray  # shape (512,)


class TapNet(nn.Module):
    def __init__(self, input_hw: tuple[int, int] = (TARGET_H, TARGET_W)):
        super().__init__()
        net = resnet18(weights=None, num_classes=2)
        net.conv1 = nn.Conv2d(4, 64, kernel_size=7, stride=2, padding=3, bias=False)
        self.net = net
        self.input_hw = tuple(input_hw)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.net(x)

    def forward_with_embedding(self, x: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        """(logits, 512-d pooled features) for a batch of 4-channel inputs."""
        n = self.net
        x = n.maxpool(n.relu(n.bn1(n.conv1(x))))
        x = n.layer4(n.layer3(n.layer2(n.layer1(x))))
        emb = torch.flatten(n.avgpool(x), 1)
        return n.fc(emb), emb


def build_classifier(seed: int, input_hw: tuple[int, int] = (TARGET_H, TARGET_W)) -> TapNet:
    """Fresh TapNet with deterministic parameter initialization."""
    torch.manual_seed(seed)
    model = TapNet(input_hw=input_hw)
    model.eval()
    return model


def model_fingerprint(model: TapNet) -> str:
    """Hash of the model weights; binds embedding indexes to a model version."""
    h = hashlib.sha256()
    state = model.state_dict()
    for key in sorted(state):
        h.update(key.encode())
        h.update(state[key].detach().cpu().numpy().tobytes())
    h.update(str(tuple(model.input_hw)).encode())
    return h.hexdigest()


def to_batch(inputs: list[ModelInput]) -> torch.Tensor:
    """Stack encoded inputs into an NCHW float tensor."""
    arr = np.stack([mi.tensor for mi in inputs]).transpose(0, 3, 1, 2)
    return torch.from_numpy(np.ascontiguousarray(arr))


@torch.no_grad()
def predict_encoded(model: TapNet, encoded: ModelInput, threshold: float = 0.5) -> PredictionResult:
    model.eval()
    logits, emb = model.forward_with_embedding(to_batch([encoded]))
    prob = torch.softmax(logits, dim=1)[0, 1].item()
    return PredictionResult(
        tap_probability=prob,
        decision=prob >= threshold,
        embedding=emb[0].numpy().copy(),
    )


def predict(
    model: TapNet, screenshot: Screenshot, bbox: BoundingBox, threshold: float = 0.5
) -> PredictionResult:
    """Tappability probability, thresholded decision, and embedding for one query."""
    encoded = encode_input(screenshot, bbox, target_hw=model.input_hw)
    return predict_encoded(model, encoded, threshold)


def embed(model: TapNet, screenshot: Screenshot, bbox: BoundingBox) -> np.ndarray:
    return predict(model, screenshot, bbox).embedding


def save_checkpoint(model: TapNet, path: str | Path, train_config: dict | None = None) -> None:
    payload = {
        "schema_version": CHECKPOINT_SCHEMA,
        "state_dict": model.state_dict(),
        "input_hw": tuple(model.input_hw),
        "normalization": "rgb_unit_scale",
        "train_config": train_config or {},
    }
    torch.save(payload, str(path))


def load_checkpoint(path: str | Path) -> TapNet:
    payload = torch.load(str(path), map_location="cpu", weights_only=False)
    if payload.get("schema_version") != CHECKPOINT_SCHEMA:
        raise ValueError(f"unsupported checkpoint schema: {payload.get('schema_version')}")
    model = TapNet(input_hw=tuple(payload["input_hw"]))
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model
