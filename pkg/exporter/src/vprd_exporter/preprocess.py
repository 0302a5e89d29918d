"""Pinned inference preprocessing.

Shorter side to 256, center crop 227, scale to [0, 1], normalize with the
ImageNet channel statistics. These constants go into every export sidecar.
"""

from __future__ import annotations

import torch
from PIL import Image
from torchvision import transforms

RESIZE = 256
CROP = 227
MEAN = (0.485, 0.456, 0.406)
STD = (0.229, 0.224, 0.225)

_PIPELINE = transforms.Compose(
    [
        transforms.Resize(RESIZE),
        transforms.CenterCrop(CROP),
        transforms.ToTensor(),
        transforms.Normalize(MEAN, STD),
    ]
)


def image_to_tensor(img: Image.Image) -> torch.Tensor:
    return _PIPELINE(img.convert("RGB"))


def constants() -> dict:
    """Preprocessing description for sidecars."""
    return {
        "resize_shorter_side": RESIZE,
        "center_crop": CROP,
        "scale": "1/255",
        "mean": list(MEAN),
        "std": list(STD),
        "interpolation": "bilinear",
    }
