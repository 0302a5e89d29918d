#!/usr/bin/env python3
"""Toy fine-tuning recipe, demo scale only.

Nudges fc6 features of heavily compressed images toward the features the
same network produces on the originals, so exported descriptors become less
sensitive to compression artifacts. A few dozen CPU steps on a handful of
images; this sketches the procedure and is nowhere near full scene-corpus
training. The resulting state dict can be fed back to the exporter via
`vprd-export --weights model.pt`.
"""

from __future__ import annotations

import argparse
import copy
import io
import sys
from pathlib import Path

import torch
from PIL import Image

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from vprd_exporter.export import list_corpus  # noqa: E402
from vprd_exporter.model import DEFAULT_SEED, build_network, extractor_from  # noqa: E402
from vprd_exporter.preprocess import image_to_tensor  # noqa: E402


def compressed_copy(img: Image.Image, percent: int) -> Image.Image:
    buf = io.BytesIO()
    img.convert("RGB").save(buf, format="JPEG", quality=100 - percent)
    buf.seek(0)
    return Image.open(buf).convert("RGB")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--corpus", required=True)
    parser.add_argument("--out", required=True, help="state-dict output path (.pt)")
    parser.add_argument("--percent", type=int, default=97, help="compression percent")
    parser.add_argument("--steps", type=int, default=30)
    parser.add_argument("--batch", type=int, default=8)
    parser.add_argument("--lr", type=float, default=1e-4)
    parser.add_argument("--weights", default="seeded")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    args = parser.parse_args(argv)

    paths = list_corpus(Path(args.corpus))
    net = build_network("alexnet", weights=args.weights, seed=args.seed)
    student = extractor_from(net, "alexnet", "fc6")
    teacher = copy.deepcopy(student).eval()
    for p in teacher.parameters():
        p.requires_grad_(False)
    student.train()

    clean, degraded = [], []
    for path in paths:
        with Image.open(path) as img:
            rgb = img.convert("RGB")
            clean.append(image_to_tensor(rgb))
            degraded.append(image_to_tensor(compressed_copy(rgb, args.percent)))
    clean = torch.stack(clean)
    degraded = torch.stack(degraded)

    optimizer = torch.optim.Adam(student.parameters(), lr=args.lr)
    generator = torch.Generator().manual_seed(args.seed)
    for step in range(args.steps):
        idx = torch.randperm(len(paths), generator=generator)[: args.batch]
        with torch.no_grad():
            target = teacher(clean[idx])
        features = student(degraded[idx])
        loss = (1.0 - torch.nn.functional.cosine_similarity(features, target)).mean()
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        print(f"step {step + 1:3d}/{args.steps}  loss {loss.item():.6f}")

    # The extractor shares parameters with `net`, so the full network state
    # is trained in place and reloads cleanly via --weights.
    torch.save(net.state_dict(), args.out)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
