"""Label-mask data model: instance masks, four-color masks, relabeling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Ceiling imposed by the 16-bit PNG label codec, not by the in-memory model.
MAX_ENCODABLE_ID = 65535


class CapacityError(ValueError):
    """A mask exceeds a hard size or id ceiling (PNG codec, canvas limits)."""


def _frozen_array(data: np.ndarray, dtype) -> np.ndarray:
    out = np.ascontiguousarray(data, dtype=dtype)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class InstanceMask:
    """2D grid of instance ids, 0 = background.

    Ids are positive 32-bit integers and need not be contiguous or sorted.
    Raster order is row-major with top-left origin; canonical relabeling and
    the greedy traversal both depend on it. The pixel array is immutable
    after construction, so masks are safe to share across workers.
    """

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 2:
            raise ValueError(f"instance mask must be 2D, got shape {data.shape}")
        if not np.issubdtype(data.dtype, np.integer):
            raise ValueError(f"instance mask needs an integer dtype, got {data.dtype}")
        if data.size and int(data.min()) < 0:
            raise ValueError("instance ids must be non-negative")
        if data.size and int(data.max()) > 0xFFFFFFFF:
            raise ValueError("instance ids must fit in 32 bits")
        object.__setattr__(self, "data", _frozen_array(data, np.uint32))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def instance_ids(self) -> np.ndarray:
        """Sorted array of the nonzero ids present in the mask."""
        ids = np.unique(self.data)
        return ids[ids != 0]


@dataclass(frozen=True, eq=False)
class FourColorMask:
    """2D grid of color codes in {0..4}, 0 = background."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 2:
            raise ValueError(f"four-color mask must be 2D, got shape {data.shape}")
        if not np.issubdtype(data.dtype, np.integer):
            raise ValueError(f"four-color mask needs an integer dtype, got {data.dtype}")
        if data.size:
            lo, hi = int(data.min()), int(data.max())
            if lo < 0 or hi > 4:
                raise ValueError(f"four-color values must lie in 0..4, found {lo}..{hi}")
        object.__setattr__(self, "data", _frozen_array(data, np.uint8))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def colors_used(self) -> int:
        """Number of distinct nonzero values present."""
        vals = np.unique(self.data)
        return int(np.count_nonzero(vals))


def relabel_instances(mask: InstanceMask) -> InstanceMask:
    """Remap instance ids to 1..N in order of first pixel in raster order.

    The pixel partition is unchanged; only the id values move. Idempotent.
    """
    flat = mask.data.ravel()
    ids, first = np.unique(flat, return_index=True)
    keep = ids != 0
    ids, first = ids[keep], first[keep]
    if ids.size == 0:
        return InstanceMask(np.zeros_like(mask.data))
    # rank ids by first appearance; ids is ascending so searchsorted maps pixels
    rank = np.empty(ids.size, dtype=np.uint32)
    rank[np.argsort(first, kind="stable")] = np.arange(1, ids.size + 1, dtype=np.uint32)
    out = np.zeros(flat.size, dtype=np.uint32)
    nz = flat != 0
    out[nz] = rank[np.searchsorted(ids, flat[nz])]
    return InstanceMask(out.reshape(mask.data.shape))


def masks_equivalent(a: InstanceMask, b: InstanceMask) -> bool:
    """True iff some bijection of nonzero ids maps a's partition onto b's.

    Background pixels must coincide. Raises on dimension mismatch.
    """
    if a.data.shape != b.data.shape:
        raise ValueError(f"mask shapes differ: {a.data.shape} vs {b.data.shape}")
    return np.array_equal(relabel_instances(a).data, relabel_instances(b).data)
