"""File codecs: 16-bit label PNGs, 8-bit four-color PNGs, feature grids."""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
from PIL import Image

from .masks import MAX_ENCODABLE_ID, CapacityError, FourColorMask, InstanceMask

FEATURE_GRID_MAGIC = b"FCFG"
FEATURE_GRID_VERSION = 1
_FEATURE_HEADER = struct.Struct("<4sIIII")  # magic, version, height, width, depth


def _open_gray(path) -> np.ndarray:
    try:
        img = Image.open(path)
        img.load()
    except FileNotFoundError:
        raise
    except OSError as exc:
        raise ValueError(f"{path}: not a readable PNG ({exc})") from exc
    if img.mode not in ("L", "I", "I;16"):
        raise ValueError(f"{path}: expected a single-channel label PNG, got mode {img.mode}")
    return np.asarray(img)


def read_instance_mask(path) -> InstanceMask:
    """Load a 16-bit (or 8-bit) single-channel label PNG."""
    arr = _open_gray(path)
    if arr.size and int(arr.min()) < 0:
        raise ValueError(f"{path}: negative label values")
    return InstanceMask(arr.astype(np.uint32))


def write_instance_mask(path, mask: InstanceMask) -> None:
    """Write a 16-bit label PNG; ids above 65535 do not fit and are refused."""
    top = int(mask.data.max(initial=0))
    if top > MAX_ENCODABLE_ID:
        raise CapacityError(
            f"mask has ids up to {top}, beyond the 16-bit PNG ceiling {MAX_ENCODABLE_ID}"
        )
    Image.fromarray(mask.data.astype(np.uint16)).save(Path(path), format="PNG")


def read_fourcolor_mask(path) -> FourColorMask:
    """Load an 8-bit four-color PNG; values must stay within 0..4."""
    arr = _open_gray(path)
    if arr.size and int(arr.max()) > 4:
        raise ValueError(f"{path}: four-color PNG contains values above 4")
    return FourColorMask(arr.astype(np.uint8))


def write_fourcolor_mask(path, fc: FourColorMask) -> None:
    Image.fromarray(fc.data.astype(np.uint8), mode="L").save(Path(path), format="PNG")


def write_rgb_png(path, rgb: np.ndarray) -> None:
    rgb = np.asarray(rgb, dtype=np.uint8)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError(f"expected an (H, W, 3) RGB array, got shape {rgb.shape}")
    Image.fromarray(rgb, mode="RGB").save(Path(path), format="PNG")


def write_feature_grid(path, features: np.ndarray) -> None:
    """Write an (H, W, d) float grid as little-endian float32 after a small header."""
    features = np.ascontiguousarray(features, dtype="<f4")
    if features.ndim != 3:
        raise ValueError(f"feature grid must have shape (H, W, d), got {features.shape}")
    height, width, depth = features.shape
    with open(path, "wb") as fh:
        fh.write(_FEATURE_HEADER.pack(FEATURE_GRID_MAGIC, FEATURE_GRID_VERSION,
                                      height, width, depth))
        fh.write(features.tobytes())


def read_feature_grid(path) -> np.ndarray:
    with open(path, "rb") as fh:
        header = fh.read(_FEATURE_HEADER.size)
        if len(header) != _FEATURE_HEADER.size:
            raise ValueError(f"{path}: truncated feature grid header")
        magic, version, height, width, depth = _FEATURE_HEADER.unpack(header)
        if magic != FEATURE_GRID_MAGIC:
            raise ValueError(f"{path}: not a feature grid file")
        if version != FEATURE_GRID_VERSION:
            raise ValueError(f"{path}: unsupported feature grid version {version}")
        payload = fh.read()
    expected = height * width * depth * 4
    if len(payload) != expected:
        raise ValueError(f"{path}: payload has {len(payload)} bytes, expected {expected}")
    return np.frombuffer(payload, dtype="<f4").reshape(height, width, depth).astype(np.float64)
