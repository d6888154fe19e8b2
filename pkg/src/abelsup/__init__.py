"""Explicit abelian supplements for outer automorphism groups of finite simple groups of Lie type."""

from .certify import certify, certify_supplement, replay, sweep
from .outgroup import enumerate_maximal_abelian, out_model

__version__ = "0.1.0"

__all__ = ["certify", "certify_supplement", "replay", "sweep", "out_model", "enumerate_maximal_abelian"]
