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

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from algebra_core import ModuleOperator, frame_dims, range_frame
from exceptions import GridSpecError, StabilizationError
from grid_model import (FiberSpec, GridOperator, GridSpec, IndexKind, SumSpec, SumVector, Vector, bilateral_shift,
                        direct_sum, distance, identity, standard_shift, window_unitary)
from residuals import Stage


@dataclass(frozen=True)
class UnitaryPart:
    """a unitary on the finite module ℬ^rank"""
    fiber: FiberSpec
    unitary: ModuleOperator

    @property
    def spec(self) -> GridSpec:
        return GridSpec(1, IndexKind.CELL, self.fiber)

    def power(self, n: int) -> GridOperator:
        u = ModuleOperator.identity(self.fiber.signature, self.fiber.rank)
        for _ in range(n):
            u = self.unitary @ u
        u_star = u.adjoint()
        return GridOperator(lambda v: v.map_fiber(u), lambda v: v.map_fiber(u_star), 0, f"U^{n}")


@dataclass(frozen=True)
class ShiftPart:
    """one-sided shift on ℓ²(ℕ, F)"""
    fiber: FiberSpec

    @property
    def spec(self) -> GridSpec:
        return GridSpec(1, IndexKind.UNILATERAL, self.fiber)

    def power(self, n: int) -> GridOperator:
        return standard_shift(self.spec, n)


@dataclass(frozen=True)
class BilateralPart:
    """two-sided shift on ℓ²(ℤ, F), unitary"""
    fiber: FiberSpec

    @property
    def spec(self) -> GridSpec:
        return GridSpec(1, IndexKind.BILATERAL, self.fiber)

    def power(self, n: int) -> GridOperator:
        return bilateral_shift(self.spec, n)


Part = Union[UnitaryPart, ShiftPart, BilateralPart]


class StructuredIsometry:
    """
    S = V (⊕ parts) V† on a direct sum of grid spaces

    V is an optional window-local unitary; `disguise_window` is the number of slots it mixes.
    """

    def __init__(self, parts: Sequence[Part], disguise: Optional[GridOperator] = None, disguise_window: int = 0):
        if not parts:
            raise GridSpecError("a structured isometry needs at least one part")
        self.parts = tuple(parts)
        self.spec = SumSpec(tuple(p.spec for p in self.parts))
        self.disguise = disguise
        self.disguise_window = disguise_window if disguise is not None else 0

    @classmethod
    def disguised(cls, parts: Sequence[Part], rng: np.random.Generator, window: int) -> "StructuredIsometry":
        plain = cls(parts)
        v = window_unitary(plain.spec, rng, 0, window)
        return cls(parts, v, window)

    def power(self, n: int) -> GridOperator:
        """Sⁿ"""
        if n == 0:
            return identity()
        core = direct_sum(self.spec, [p.power(n) for p in self.parts])
        if self.disguise is None:
            return core
        return self.disguise @ core @ self.disguise.adjoint()

    def probes(self, lo: int, hi: int) -> List[SumVector]:
        return self.spec.probes(lo, hi)

    def part_projection(self, index: int) -> GridOperator:
        return part_projection(self, index)

    def __repr__(self):
        names = ",".join(type(p).__name__ for p in self.parts)
        return f"StructuredIsometry([{names}], disguise_window={self.disguise_window})"


def part_projection(s: StructuredIsometry, index: int) -> GridOperator:
    """V (indicator of part `index`) V†"""
    if not 0 <= index < len(s.parts):
        raise GridSpecError(f"no part {index} in {s}")

    def keep(v: SumVector) -> SumVector:
        return s.spec.embed(index, v.component(index))

    core = GridOperator(keep, keep, 0, f"P{index}")
    if s.disguise is None:
        return core
    return s.disguise @ core @ s.disguise.adjoint()


def range_projections(s: StructuredIsometry, n_max: int, probes: Sequence[Vector] = (),
                      tol: float = 1e-10) -> List[GridOperator]:
    """r_n = Sⁿ S†ⁿ for n = 0..n_max; on probes ⟨x, r_n x⟩ must decrease in n"""
    if n_max < 1:
        raise GridSpecError(f"n_max must be >= 1, got {n_max}")
    rs = []
    for n in range(n_max + 1):
        sn = s.power(n)
        rs.append(sn @ sn.adjoint())
    violation = monotonicity_violation(rs, probes)
    if violation > tol:
        logger.warning(f"range projections fail to decrease by {violation:.3e}")
    return rs


def monotonicity_violation(rs: Sequence[GridOperator], probes: Sequence[Vector]) -> float:
    worst = 0.0
    for x in probes:
        values = [x.inner(r(x)) for r in rs]
        for a, b in zip(values, values[1:]):
            worst = max(worst, -(a - b).min_eigenvalue())
    return worst


def block_ranks(op: GridOperator, probes: Sequence[Vector], spec, tol: float = 1e-8) -> Tuple[int, ...]:
    """per-block complex dimension of the span of op applied to probes"""
    images = [y for y in (op(x) for x in probes) if not y.is_zero()]
    bounds = [y.support_bounds() for y in images]
    lo, hi = min((b[0] for b in bounds), default=0), max((b[1] for b in bounds), default=0)
    frame, gram = range_frame([spec.flatten(y, lo, hi) for y in images], tol, signature=spec.signature)
    return frame_dims(frame, gram)


@dataclass
class DecompositionResult:
    unitary_projection: GridOperator
    pure_projection: GridOperator
    residual: float
    stabilization_step: int
    trace: List[float] = field(default_factory=list)
    unitary_ranks: Tuple[int, ...] = ()
    pure_ranks: Tuple[int, ...] = ()
    stage: Optional[Stage] = None


def decompose(s: StructuredIsometry, window: int, n_max: Optional[int] = None, tol: float = 1e-10) -> DecompositionResult:
    """
    E_u and E_p of S as seen by the slot probes of [0, window)

    r_n is stable once ‖r_{n_max} x - r_{n_max - 1} x‖ < tol on every probe; the stabilization
    step is the first n with r_n x = r_{n_max} x.
    """
    if window < 1:
        raise GridSpecError(f"window must be >= 1, got {window}")
    if n_max is None:
        n_max = max(window, s.disguise_window) + 2
    probes = s.probes(0, window)
    rs = range_projections(s, n_max, probes, tol)

    images = [[r(x) for x in probes] for r in rs]
    final = images[-1]
    trace = [max((distance(a, b) for a, b in zip(images[n], images[n - 1])), default=0.0)
             for n in range(1, n_max + 1)]
    if trace[-1] >= tol:
        raise StabilizationError(f"range projections still move after {n_max} steps: {trace[-1]:.3e}", trace)
    step = next(n for n in range(n_max + 1)
                if max((distance(a, b) for a, b in zip(images[n], final)), default=0.0) < tol)
    logger.info(f"Wold decomposition of {s} stabilized at n = {step}")

    unitary = rs[step]
    pure = identity() - unitary
    stage = Stage("wold")
    sop = s.power(1)
    worst = {"projection": 0.0, "orthogonality": 0.0, "invariance_unitary": 0.0, "invariance_pure": 0.0,
             "unitary_restriction": 0.0}
    for k, x in enumerate(probes):
        y = probes[(k + 1) % len(probes)]
        ux, px = unitary(x), pure(x)
        worst["projection"] = max(worst["projection"], distance(unitary(ux), ux), distance(pure(px), px))
        worst["orthogonality"] = max(worst["orthogonality"], ux.inner(pure(y)).max_abs())
        sux = sop(ux)
        worst["invariance_unitary"] = max(worst["invariance_unitary"], distance(unitary(sux), sux))
        spx = sop.adjoint_apply(px)
        worst["invariance_pure"] = max(worst["invariance_pure"], distance(pure(spx), spx))
        worst["unitary_restriction"] = max(worst["unitary_restriction"], distance(sop(sop.adjoint_apply(ux)), ux))
    for key, value in worst.items():
        stage.record(key, value, tol)

    result = DecompositionResult(unitary, pure, trace[-1], step, trace,
                                 block_ranks(unitary, probes, s.spec), block_ranks(pure, probes, s.spec), stage)
    stage.data.update({"stabilization_step": step, "trace": trace,
                       "unitary_ranks": list(result.unitary_ranks), "pure_ranks": list(result.pure_ranks)})
    return result


class ProbeClass(str, Enum):
    PURE = "pure"
    UNITARY = "unitary"
    MIXED = "mixed"


@dataclass
class PurenessRow:
    norms: List[float]
    verdict: ProbeClass


def pureness_metric(s: StructuredIsometry, probes: Sequence[Vector], n_max: int,
                    tol: float = 1e-10) -> List[PurenessRow]:
    """decay table ‖S†ⁿ x‖, n = 0..n_max, per probe"""
    rows = []
    s_star = s.power(1).adjoint()
    for x in probes:
        norms = [x.norm()]
        y = x
        for _ in range(n_max):
            y = s_star(y)
            norms.append(y.norm())
        if norms[-1] <= tol:
            verdict = ProbeClass.PURE
        elif abs(norms[-1] - norms[0]) <= tol:
            verdict = ProbeClass.UNITARY
        else:
            verdict = ProbeClass.MIXED
        rows.append(PurenessRow(norms, verdict))
    return rows
