"""Pretrained-network feature extractors cut at a named fc layer."""

from __future__ import annotations

import hashlib
from pathlib import Path

import torch
from torchvision.models import alexnet

from .errors import ModelError

# layer name -> (end of the classifier slice, exclusive; output width).
# Features are taken after the ReLU that follows the Linear, so cosine
# scores over them stay non-negative.
_ALEXNET_LAYERS = {
    "fc6": (3, 4096),
    "fc7": (6, 4096),
}

DEFAULT_SEED = 97


def available_models() -> list[str]:
    return ["alexnet"]


def available_layers(model: str) -> list[str]:
    if model != "alexnet":
        raise ModelError(f"unknown model {model!r}, have: {', '.join(available_models())}")
    return sorted(_ALEXNET_LAYERS)


class FcFeatureExtractor(torch.nn.Module):
    """Convolutional trunk plus the classifier prefix ending at one fc layer.

    Slicing nn.Sequential shares the underlying modules, so training this
    extractor trains the network it was cut from.
    """

    def __init__(self, net, classifier_end: int, dim: int):
        super().__init__()
        self.trunk = torch.nn.Sequential(
            net.features,
            net.avgpool,
            torch.nn.Flatten(1),
            net.classifier[:classifier_end],
        )
        self.dim = dim

    def forward(self, batch: torch.Tensor) -> torch.Tensor:
        return self.trunk(batch)


def build_network(model: str, weights: str = "seeded", seed: int = DEFAULT_SEED):
    """Instantiate the full torchvision network with the requested weights:
    'seeded' (deterministic random init), 'pretrained' (downloaded), or a
    state-dict file path such as the fine-tuning recipe's output."""
    if model != "alexnet":
        raise ModelError(f"unknown model {model!r}, have: {', '.join(available_models())}")
    if weights == "seeded":
        torch.manual_seed(seed)
        return alexnet(weights=None)
    if weights == "pretrained":
        from torchvision.models import AlexNet_Weights

        try:
            return alexnet(weights=AlexNet_Weights.IMAGENET1K_V1)
        except Exception as exc:
            raise ModelError(f"cannot fetch pretrained weights: {exc}") from exc
    path = Path(weights)
    if not path.is_file():
        raise ModelError(f"weights file not found: {path}")
    net = alexnet(weights=None)
    try:
        state = torch.load(path, map_location="cpu", weights_only=True)
        net.load_state_dict(state)
    except Exception as exc:
        raise ModelError(f"cannot load weights from {path}: {exc}") from exc
    return net


def extractor_from(net, model: str, layer: str) -> FcFeatureExtractor:
    if model != "alexnet":
        raise ModelError(f"unknown model {model!r}, have: {', '.join(available_models())}")
    if layer not in _ALEXNET_LAYERS:
        raise ModelError(
            f"model {model!r} has no layer {layer!r}, have: {', '.join(sorted(_ALEXNET_LAYERS))}"
        )
    end, dim = _ALEXNET_LAYERS[layer]
    return FcFeatureExtractor(net, end, dim)


def load_extractor(model: str, layer: str, weights: str = "seeded",
                   seed: int = DEFAULT_SEED) -> FcFeatureExtractor:
    """Build the network and cut it at `layer`, in eval mode."""
    extractor = extractor_from(build_network(model, weights, seed), model, layer)
    extractor.eval()
    return extractor


def state_digest(module: torch.nn.Module) -> str:
    """sha256 over the state dict, parameter names and bytes, sorted."""
    h = hashlib.sha256()
    state = module.state_dict()
    for name in sorted(state):
        h.update(name.encode("utf-8"))
        h.update(state[name].contiguous().numpy().tobytes())
    return h.hexdigest()
