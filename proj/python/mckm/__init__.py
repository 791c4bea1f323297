"""Multi-prototype sampling + convex merging clustering."""

from ._mckm import ari, f_star, fit, generate, nmi, normalize

__all__ = ["ari", "f_star", "fit", "generate", "nmi", "normalize"]
