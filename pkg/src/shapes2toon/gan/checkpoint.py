"""Checkpoint directory format: manifest.json plus one binary blob per parameter.

Blob layout (little-endian): u64 name length, name bytes (utf-8), u64 rank,
u64 per dimension, then float32 data. Round trips are bit-exact.
"""

from __future__ import annotations

import json
import struct
from dataclasses import asdict
from pathlib import Path

import numpy as np
import torch

from .nets import DiscriminatorConfig, GeneratorConfig, PatchDiscriminator, UNetGenerator

FORMAT_VERSION = 1


class CheckpointError(ValueError):
    pass


def _write_blob(path: Path, name: str, tensor: torch.Tensor):
    data = tensor.detach().to(torch.float32).contiguous().numpy()
    name_bytes = name.encode("utf-8")
    with open(path, "wb") as f:
        f.write(struct.pack("<Q", len(name_bytes)))
        f.write(name_bytes)
        f.write(struct.pack("<Q", data.ndim))
        f.write(struct.pack(f"<{data.ndim}Q", *data.shape))
        f.write(data.astype("<f4").tobytes())


def _read_blob(path: Path):
    raw = Path(path).read_bytes()
    off = 0
    (name_len,) = struct.unpack_from("<Q", raw, off)
    off += 8
    name = raw[off : off + name_len].decode("utf-8")
    off += name_len
    (rank,) = struct.unpack_from("<Q", raw, off)
    off += 8
    dims = struct.unpack_from(f"<{rank}Q", raw, off)
    off += 8 * rank
    count = int(np.prod(dims)) if rank else 1
    data = np.frombuffer(raw, dtype="<f4", count=count, offset=off).reshape(dims)
    return name, torch.from_numpy(data.copy())


def _blob_filename(name: str) -> str:
    return name.replace(".", "_") + ".bin"


def save_checkpoint(out_dir, generator: UNetGenerator, discriminator: PatchDiscriminator, step: int, seed: int, extra=None):
    """Write models + metadata; returns the checkpoint directory path."""
    root = Path(out_dir)
    (root / "params").mkdir(parents=True, exist_ok=True)
    params = {}
    for prefix, model in (("g", generator), ("d", discriminator)):
        for name, tensor in model.state_dict().items():
            full = f"{prefix}.{name}"
            fname = _blob_filename(full)
            _write_blob(root / "params" / fname, full, tensor)
            params[full] = fname
    manifest = {
        "format_version": FORMAT_VERSION,
        "generator": asdict(generator.cfg),
        "discriminator": asdict(discriminator.cfg),
        "step": int(step),
        "seed": int(seed),
        "params": params,
    }
    if extra:
        manifest["extra"] = extra
    (root / "manifest.json").write_text(json.dumps(manifest, indent=1))
    return root


def load_checkpoint(ckpt_dir):
    """Rebuild (generator, discriminator, manifest) from a checkpoint directory."""
    root = Path(ckpt_dir)
    mpath = root / "manifest.json"
    if not mpath.exists():
        raise CheckpointError(f"no manifest.json under {root}")
    manifest = json.loads(mpath.read_text())
    if manifest.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint format {manifest.get('format_version')}")
    gen = UNetGenerator(GeneratorConfig(**manifest["generator"]))
    disc = PatchDiscriminator(DiscriminatorConfig(**manifest["discriminator"]))
    states = {"g": {}, "d": {}}
    for full, fname in manifest["params"].items():
        name, tensor = _read_blob(root / "params" / fname)
        if name != full:
            raise CheckpointError(f"blob {fname} carries name {name!r}, manifest says {full!r}")
        prefix, param_name = full.split(".", 1)
        states[prefix][param_name] = tensor
    try:
        gen.load_state_dict(states["g"])
        disc.load_state_dict(states["d"])
    except RuntimeError as e:
        raise CheckpointError(f"checkpoint/architecture mismatch: {e}") from e
    gen.eval()
    disc.eval()
    return gen, disc, manifest
