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

from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from algebra_core import AlgebraSignature, ModuleOperator
from exceptions import GridAlignmentError, GridSpecError
from grid_model import (FiberSpec, GridOperator, GridSpec, IndexKind, SumSpec, TimeLike, Vector,
                        adjoint_pairing_residual, bilateral_shift, direct_sum, distance, identity,
                        slots_of, standard_shift, window_unitary)
from residuals import Stage
from semigroup_base import AbstractSemigroup


class StandardShiftSemigroup(AbstractSemigroup):
    """v_t on L²(ℝ₊, F)"""

    def __init__(self, spec: GridSpec):
        if spec.index_kind != IndexKind.UNILATERAL:
            raise GridSpecError("the standard shift lives on a unilateral grid")
        super().__init__(spec, "v")

    def at(self, t: TimeLike) -> GridOperator:
        return standard_shift(self.spec, t)


class BilateralShiftSemigroup(AbstractSemigroup):
    """translations of L²(ℝ, F) restricted to t >= 0; unitary, hence not pure"""
    declared_pure = False

    def __init__(self, spec: GridSpec):
        if spec.index_kind != IndexKind.BILATERAL:
            raise GridSpecError("the bilateral shift lives on a bilateral grid")
        super().__init__(spec, "u")

    def at(self, t: TimeLike) -> GridOperator:
        j = slots_of(t)
        if j < 0:
            raise GridAlignmentError(f"semigroup times are nonnegative, got {j}")
        return bilateral_shift(self.spec, j)


class DirectSumSemigroup(AbstractSemigroup):
    def __init__(self, spec: SumSpec, parts: Sequence[AbstractSemigroup]):
        parts = tuple(parts)
        if tuple(p.spec for p in parts) != spec.parts:
            raise GridSpecError("semigroup parts must act on the parts of the direct sum")
        super().__init__(spec, "⊕".join(p.name for p in parts))
        self.parts = parts
        self.declared_pure = all(p.declared_pure for p in parts)

    def at(self, t: TimeLike) -> GridOperator:
        return direct_sum(self.spec, [p.at(t) for p in self.parts])


class DisguisedSemigroup(AbstractSemigroup):
    """V s_t V† for a unitary V on the same space"""

    def __init__(self, base: AbstractSemigroup, disguise: GridOperator):
        super().__init__(base.spec, f"V{base.name}V†")
        self.base = base
        self.disguise = disguise
        self.declared_pure = base.declared_pure

    def at(self, t: TimeLike) -> GridOperator:
        if slots_of(t) == 0:
            return identity()
        return self.disguise @ self.base.at(t) @ self.disguise.adjoint()


def disguised_shift(signature: AlgebraSignature, rank: int, slots_per_unit: int, disguise_units: int,
                    rng: np.random.Generator, nonpure: bool = False,
                    projection: Optional[ModuleOperator] = None) -> AbstractSemigroup:
    """
    standard shift over F = ℬ^rank (or pℬ^rank), conjugated by a Haar-random unitary on
    the first `disguise_units` units

    With nonpure=True a bilateral shift over ℬ¹ is adjoined before disguising.
    """
    spec = GridSpec(slots_per_unit, IndexKind.UNILATERAL, FiberSpec(signature, rank, projection))
    base: AbstractSemigroup = StandardShiftSemigroup(spec)
    if nonpure:
        bilateral = GridSpec(slots_per_unit, IndexKind.BILATERAL, FiberSpec(signature, 1))
        base = DirectSumSemigroup(SumSpec((spec, bilateral)), [base, BilateralShiftSemigroup(bilateral)])
    if disguise_units <= 0:
        return base
    logger.debug(f"disguising {base} on {disguise_units} units")
    v = window_unitary(base.spec, rng, 0, disguise_units * slots_per_unit)
    return DisguisedSemigroup(base, v)


def check_semigroup(s: AbstractSemigroup, probes: Sequence[Vector], pairs: Iterable[Tuple[int, int]],
                    tol: float) -> Stage:
    """identity at 0, the semigroup law, ℬ-valued isometry and adjoint pairing on probes"""
    stage = Stage("semigroup")
    pairs = list(pairs)
    probes = list(probes)

    stage.record("identity", max((distance(s.at(0)(x), x) for x in probes), default=0.0), tol)

    law = 0.0
    for r, t in pairs:
        lhs, rhs = s.at(r) @ s.at(t), s.at(r + t)
        law = max(law, max((distance(lhs(x), rhs(x)) for x in probes), default=0.0))
    stage.record("law", law, tol)

    iso, pairing = 0.0, 0.0
    times = sorted({t for pair in pairs for t in pair})
    for t in times:
        op = s.at(t)
        images = [op(x) for x in probes]
        for k, x in enumerate(probes):
            y = probes[(k + 1) % len(probes)]
            iso = max(iso, (images[k].inner(images[(k + 1) % len(probes)]) - x.inner(y)).max_abs())
            pairing = max(pairing, adjoint_pairing_residual(op, x, y))
    stage.record("isometry", iso, tol)
    stage.record("adjoint", pairing, tol)
    return stage
