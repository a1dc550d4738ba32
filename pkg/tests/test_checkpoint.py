import json

import pytest
import torch

from shapes2toon.gan import (
    CheckpointError,
    DiscriminatorConfig,
    GeneratorConfig,
    PatchDiscriminator,
    UNetGenerator,
    init_weights,
    load_checkpoint,
    save_checkpoint,
)


def _models(seed=0, ng=4, nd=4, size=64):
    gen = UNetGenerator(GeneratorConfig(ng=ng, image_size=size))
    disc = PatchDiscriminator(DiscriminatorConfig(nd=nd))
    g = torch.Generator().manual_seed(seed)
    init_weights(gen, generator=g)
    init_weights(disc, generator=g)
    return gen, disc


def test_round_trip_bit_exact(tmp_path):
    gen, disc = _models(seed=3)
    save_checkpoint(tmp_path / "ck", gen, disc, step=17, seed=3)
    gen2, disc2, manifest = load_checkpoint(tmp_path / "ck")
    assert manifest["step"] == 17 and manifest["seed"] == 3
    for a, b in zip(gen.state_dict().values(), gen2.state_dict().values()):
        assert torch.equal(a, b)
    for a, b in zip(disc.state_dict().values(), disc2.state_dict().values()):
        assert torch.equal(a, b)


def test_round_trip_preserves_forward_bits(tmp_path):
    gen, disc = _models(seed=5)
    save_checkpoint(tmp_path / "ck", gen, disc, step=1, seed=5)
    gen2, _, _ = load_checkpoint(tmp_path / "ck")
    x = torch.rand(1, 3, 64, 64)
    gen.set_noise(False)
    gen2.set_noise(False)
    with torch.no_grad():
        assert torch.equal(gen(x), gen2(x))


def test_missing_manifest_raises(tmp_path):
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path)


def test_architecture_mismatch_detected(tmp_path):
    gen, disc = _models(ng=4)
    save_checkpoint(tmp_path / "ck", gen, disc, step=0, seed=0)
    manifest = json.loads((tmp_path / "ck" / "manifest.json").read_text())
    manifest["generator"]["ng"] = 8
    (tmp_path / "ck" / "manifest.json").write_text(json.dumps(manifest))
    with pytest.raises(CheckpointError, match="mismatch"):
        load_checkpoint(tmp_path / "ck")


def test_blob_name_mismatch_detected(tmp_path):
    gen, disc = _models()
    save_checkpoint(tmp_path / "ck", gen, disc, step=0, seed=0)
    manifest = json.loads((tmp_path / "ck" / "manifest.json").read_text())
    keys = sorted(manifest["params"])
    # swap two blob paths so header names disagree with the manifest
    manifest["params"][keys[0]], manifest["params"][keys[1]] = (
        manifest["params"][keys[1]],
        manifest["params"][keys[0]],
    )
    (tmp_path / "ck" / "manifest.json").write_text(json.dumps(manifest))
    with pytest.raises(CheckpointError, match="carries name"):
        load_checkpoint(tmp_path / "ck")


def test_blob_header_layout(tmp_path):
    import struct

    gen, disc = _models()
    root = save_checkpoint(tmp_path / "ck", gen, disc, step=0, seed=0)
    manifest = json.loads((root / "manifest.json").read_text())
    state = {f"g.{k}": v for k, v in gen.state_dict().items()}
    state.update({f"d.{k}": v for k, v in disc.state_dict().items()})
    for name, fname in manifest["params"].items():
        raw = (root / "params" / fname).read_bytes()
        (nlen,) = struct.unpack_from("<Q", raw, 0)
        assert raw[8 : 8 + nlen].decode() == name
        (rank,) = struct.unpack_from("<Q", raw, 8 + nlen)
        dims = struct.unpack_from(f"<{rank}Q", raw, 16 + nlen)
        assert dims == tuple(state[name].shape)
        n_floats = 1
        for d in dims:
            n_floats *= d
        assert len(raw) == 8 + nlen + 8 + 8 * rank + 4 * n_floats
