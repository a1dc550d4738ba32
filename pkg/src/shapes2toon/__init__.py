"""shapes2toon: paired shape-layout to cartoon-face translation.

Pipeline pieces: geometric layouts and rasterization, a synthetic paired
corpus with geometric augmentation, circle/ellipse fitting, a U-Net + patch
discriminator translation model, Frechet-distance evaluation, and a CLI plus
HTTP service for inference.
"""

__version__ = "0.1.0"
