"""Input validation and RNG plumbing shared by the estimators and the functional API."""

from __future__ import annotations

import numpy as np

from .errors import StructuralError


def as_rng(seed=None) -> np.random.Generator:
    """Coerce ``None``, an integer seed, or a Generator into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def derive_rng(seed: int, label: str) -> np.random.Generator:
    """Derive the named child stream of a master seed.

    Each pipeline stage (data generation, GA, split shuffling, weight
    init) pulls randomness from its own labelled stream, so one master
    seed reproduces an entire run and stages stay independent of each
    other's draw counts.
    """
    entropy = [int(seed), *label.encode("utf-8")]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def check_interval(lo, hi, name="range"):
    lo, hi = float(lo), float(hi)
    if not (np.isfinite(lo) and np.isfinite(hi)) or not lo < hi:
        raise StructuralError(f"{name} must be a finite interval with lo < hi, got [{lo}, {hi}]")
    return lo, hi


def check_vector(x, length=None, name="vector") -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise StructuralError(f"{name} must be 1-D, got shape {arr.shape}")
    if length is not None and arr.shape[0] != length:
        raise StructuralError(f"{name} must have length {length}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise StructuralError(f"{name} contains non-finite entries")
    return arr


def check_matrix(x, name="matrix") -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise StructuralError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise StructuralError(f"{name} contains non-finite entries")
    return arr


def check_bits(bits, name="bits") -> np.ndarray:
    """Validate a {0,1} series and return it as uint8."""
    arr = np.asarray(bits)
    if arr.ndim != 1:
        raise StructuralError(f"{name} must be 1-D, got shape {arr.shape}")
    values = np.unique(arr)
    if not np.all(np.isin(values, (0, 1))):
        raise StructuralError(f"{name} must contain only 0 and 1")
    return arr.astype(np.uint8)


def bits_to_bipolar(bits) -> np.ndarray:
    """Map a {0,1} series onto the activation's {-1,+1} range."""
    return check_bits(bits).astype(np.float64) * 2.0 - 1.0


def check_probability(p, name="probability", open_interval=False):
    p = float(p)
    ok = 0.0 < p < 1.0 if open_interval else 0.0 <= p <= 1.0
    if not ok:
        kind = "(0, 1)" if open_interval else "[0, 1]"
        raise StructuralError(f"{name} must lie in {kind}, got {p}")
    return p
