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

import abc
from typing import List

import numpy as np

from grid_model import GridOperator, GridTime, Space, TimeLike, Vector


class AbstractSemigroup(abc.ABC):
    """
    semigroup {s_t} of adjointable isometries on a grid space, indexed by grid times

    Implementations return at(0) = id and must satisfy at(r)∘at(t) = at(r+t);
    `check_semigroup` in semigroups measures both.
    """
    declared_pure = True

    def __init__(self, spec: Space, name: str):
        self.spec = spec
        self.name = name

    @property
    def slots_per_unit(self) -> int:
        return self.spec.slots_per_unit

    @abc.abstractmethod
    def at(self, t: TimeLike) -> GridOperator:
        pass

    def time(self, units: float) -> GridTime:
        return GridTime.from_units(units, self.slots_per_unit)

    def probes(self, lo: int, hi: int) -> List[Vector]:
        return self.spec.probes(lo, hi)

    def random(self, rng: np.random.Generator, lo: int, hi: int) -> Vector:
        return self.spec.random(rng, lo, hi)

    def __repr__(self):
        return f"{type(self).__name__}({self.name}, N={self.slots_per_unit})"
