"""
This file is part of pureshift.
Copyright (c) 2026 the pureshift authors.

This program is free software: you can redistribute it and/or modify it under
the terms of the GNU General Public License as published by the Free Software
Foundation.
This program is distributed in the hope that it will be useful, but WITHOUT
ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS
FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with
this program. If not, see <http://www.gnu.org/licenses/>.
"""

from typing import Any, List, Optional

import numpy as np

from exceptions import FixtureParsingError


def make_rng(seed: Optional[int]) -> np.random.Generator:
    # PCG64, the portable numpy bit generator; fixtures reproduce across machines
    return np.random.default_rng(seed)


def overlap(a: int, b: Optional[int], c: int, d: Optional[int]) -> int:
    """length in slots of [a, b) ∩ [c, d), None meaning +∞"""
    lo = max(a, c)
    if b is None and d is None:
        raise ValueError("overlap of two unbounded intervals is infinite")
    hi = min(x for x in (b, d) if x is not None)
    return max(hi - lo, 0)


def to_pairs(arr: np.ndarray) -> List[Any]:
    """complex array -> nested lists of [re, im] pairs"""
    arr = np.asarray(arr, dtype=complex)
    if arr.ndim == 0:
        return [float(arr.real), float(arr.imag)]
    return [to_pairs(row) for row in arr]


def clean_pairs(value: Any, where: str = "") -> np.ndarray:
    """nested [re, im] pairs (or plain numbers) -> complex array"""
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise FixtureParsingError(f"{where}: not a numeric array")

    if arr.ndim == 0:
        return np.asarray(complex(arr), dtype=complex)
    if arr.shape[-1] != 2:
        raise FixtureParsingError(f"{where}: complex entries must be [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]
