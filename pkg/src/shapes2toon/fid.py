"""Frechet-distance evaluation between image sets with pluggable embedders.

d^2 = ||mu1 - mu2||^2 + Tr(S1 + S2 - 2 (S1 S2)^{1/2}), with the matrix square
root taken through the symmetric product S1^{1/2} S2 S1^{1/2}, so only
symmetric eigendecompositions are involved.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .raster import RasterImage
from .train import translate

# eigenvalues below -PSD_TOL are an error; negatives above it clamp to zero
PSD_TOL = 1e-6
_INVARIANT_EIG_TOL = -1e-8


class FidError(ValueError):
    pass


@dataclass(frozen=True)
class EmbeddingSet:
    n: int
    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=np.float64).reshape(-1)
        sigma = np.asarray(self.sigma, dtype=np.float64)
        if sigma.shape != (mu.size, mu.size):
            raise FidError(f"sigma shape {sigma.shape} does not match dimension {mu.size}")
        if self.n < 2:
            raise FidError(f"need n >= 2 samples to fit covariance, got {self.n}")
        if not np.allclose(sigma, sigma.T, atol=1e-8):
            raise FidError("sigma must be symmetric")
        if float(np.linalg.eigvalsh(sigma).min()) < _INVARIANT_EIG_TOL:
            raise FidError("sigma is not positive semi-definite")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", (sigma + sigma.T) / 2.0)

    @property
    def dim(self):
        return self.mu.size


def embed(images, extractor) -> EmbeddingSet:
    """Fit sample mean and unbiased covariance of extractor features."""
    feats = extractor(list(images))
    feats = [np.asarray(f, dtype=np.float64).reshape(-1) for f in feats]
    if len(feats) < 2:
        raise FidError(f"need at least 2 images, got {len(feats)}")
    dims = {f.size for f in feats}
    if len(dims) != 1:
        raise FidError(f"extractor output dimension mismatch across images: {sorted(dims)}")
    x = np.stack(feats)
    mu = x.mean(axis=0)
    sigma = np.cov(x, rowvar=False, ddof=1)
    sigma = np.atleast_2d(sigma)
    return EmbeddingSet(n=len(feats), mu=mu, sigma=sigma)


def _psd_sqrt(m: np.ndarray):
    """(sqrt(m), clamp_count) for a symmetric PSD matrix via eigh."""
    vals, vecs = np.linalg.eigh((m + m.T) / 2.0)
    low = float(vals.min())
    if low < -PSD_TOL:
        raise FidError(f"covariance not PSD (eigenvalue {low:.3e})")
    clamped = int((vals < 0).sum())
    vals = np.clip(vals, 0.0, None)
    root = (vecs * np.sqrt(vals)) @ vecs.T
    return root, clamped


def frechet_distance_stats(a: EmbeddingSet, b: EmbeddingSet):
    """(distance, clamp_count); see :func:`frechet_distance`."""
    if a.dim != b.dim:
        raise FidError(f"dimension mismatch: {a.dim} vs {b.dim}")
    s1_root, c1 = _psd_sqrt(a.sigma)
    inner = s1_root @ b.sigma @ s1_root
    vals = np.linalg.eigvalsh((inner + inner.T) / 2.0)
    low = float(vals.min())
    if low < -PSD_TOL * max(1.0, float(np.abs(vals).max())):
        raise FidError(f"covariance not PSD (product eigenvalue {low:.3e})")
    c2 = int((vals < 0).sum())
    tr_sqrt = float(np.sqrt(np.clip(vals, 0.0, None)).sum())
    diff = a.mu - b.mu
    d2 = float(diff @ diff) + float(np.trace(a.sigma) + np.trace(b.sigma)) - 2.0 * tr_sqrt
    return max(d2, 0.0), c1 + c2


def frechet_distance(a: EmbeddingSet, b: EmbeddingSet) -> float:
    """Squared Frechet distance between the fitted Gaussians (lower = closer)."""
    return frechet_distance_stats(a, b)[0]


class RandomConvEmbedder:
    """Fixed-seed random convolutional features for desk-scale evaluation.

    Scores from this embedder are self-consistent but NOT comparable to any
    published FID numbers, which use a pretrained inception network.
    """

    def __init__(self, seed: int = 0, dim: int = 64, input_size: int = 64):
        self.seed = seed
        self.dim = dim
        self.input_size = input_size
        g = torch.Generator().manual_seed(seed)
        widths = [3, 16, 32, dim]
        self._convs = []
        for cin, cout in zip(widths[:-1], widths[1:]):
            w = torch.randn(cout, cin, 3, 3, generator=g) * (1.0 / (3.0 * cin**0.5))
            self._convs.append(w)

    @property
    def extractor_id(self) -> str:
        return f"randconv-seed{self.seed}-d{self.dim}-in{self.input_size}"

    def __call__(self, images):
        out = []
        with torch.no_grad():
            for img in images:
                arr = img.to_rgb().resize(self.input_size, self.input_size).pixels
                x = torch.from_numpy(arr.copy()).permute(2, 0, 1).unsqueeze(0)
                for w in self._convs:
                    x = torch.conv2d(x, w, stride=2, padding=1)
                    x = torch.nn.functional.leaky_relu(x, 0.2)
                feat = x.mean(dim=(2, 3)).squeeze(0)
                out.append(feat.numpy().astype(np.float64))
        return out


class InceptionV3Embedder:
    """Adapter for a torchvision inception feature extractor, when its
    pretrained weights are available locally."""

    extractor_id = "inception-v3-pool"

    def __init__(self):
        try:
            from torchvision.models import Inception_V3_Weights, inception_v3
        except ImportError as e:
            raise RuntimeError("torchvision is required for the inception embedder") from e
        try:
            net = inception_v3(weights=Inception_V3_Weights.IMAGENET1K_V1)
        except Exception as e:
            raise RuntimeError(f"pretrained inception weights unavailable: {e}") from e
        net.fc = torch.nn.Identity()
        net.eval()
        self._net = net

    def __call__(self, images):
        out = []
        with torch.no_grad():
            for img in images:
                arr = img.to_rgb().resize(299, 299).pixels
                x = torch.from_numpy(arr.copy()).permute(2, 0, 1).unsqueeze(0)
                out.append(self._net(x).squeeze(0).numpy().astype(np.float64))
        return out


@dataclass(frozen=True)
class EvalReport:
    fid: float
    mean_l1: float
    n_test: int
    extractor_id: str
    checkpoint_id: str

    def to_json(self) -> str:
        return json.dumps(
            {
                "fid": self.fid,
                "mean_l1": self.mean_l1,
                "n_test": self.n_test,
                "extractor_id": self.extractor_id,
                "checkpoint_id": self.checkpoint_id,
            },
            indent=1,
        )


def checkpoint_id(ckpt_dir) -> str:
    manifest = Path(ckpt_dir) / "manifest.json"
    return hashlib.sha256(manifest.read_bytes()).hexdigest()[:16]


def evaluate_model(ckpt_dir, manifest, test_ids, extractor, dropout_seed: int = 0) -> EvalReport:
    """Translate every test source, then FID + mean per-pair L1 against targets."""
    test_ids = list(test_ids)
    if not test_ids:
        raise FidError("test split is empty")
    from .gan import load_checkpoint

    gen, _, _ = load_checkpoint(ckpt_dir)
    generated, real = [], []
    l1_sum = 0.0
    for sample_id in test_ids:
        pair = manifest.load_pair(sample_id)
        out = translate(gen, pair.source, dropout_seed=dropout_seed)
        tgt = pair.target.to_rgb().resize(out.width, out.height)
        generated.append(out)
        real.append(tgt)
        l1_sum += float(np.abs(out.pixels.astype(np.float64) - tgt.pixels.astype(np.float64)).mean())
    fid = frechet_distance(embed(generated, extractor), embed(real, extractor))
    return EvalReport(
        fid=fid,
        mean_l1=l1_sum / len(test_ids),
        n_test=len(test_ids),
        extractor_id=extractor.extractor_id,
        checkpoint_id=checkpoint_id(ckpt_dir),
    )
