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
from math import ceil, sqrt
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from algebra_core import AlgebraElement, AlgebraSignature, ModuleOperator, ModuleVector, Scalar
from exceptions import GridResolutionError, GridSpecError, InterleaveLawError
from grid_model import (FiberSpec, GridOperator, GridSpec, GridVector, IndexKind, SumVector, TimeLike,
                        bilateral_shift, distance, identity, indicator, multiplication_phase, sample_profile,
                        slots_of, standard_shift)
from residuals import Stage
from semigroup_base import AbstractSemigroup
from wold_decomposition import (BilateralPart, DecompositionResult, ShiftPart, StructuredIsometry, block_ranks,
                                decompose)


class UnitTensorSpec:
    """L²[0,1) ⊗ Ĕ on N slots of weight h, each slot holding a vector of the base space"""

    def __init__(self, base: StructuredIsometry, slots_per_unit: int):
        if slots_per_unit < 1:
            raise GridSpecError(f"slots per unit must be >= 1, got {slots_per_unit}")
        self.base = base
        self.slots_per_unit = slots_per_unit

    @property
    def h(self) -> float:
        return 1.0 / self.slots_per_unit

    @property
    def signature(self) -> AlgebraSignature:
        return self.base.spec.signature

    def zero(self) -> "UnitTensorVector":
        return UnitTensorVector(self, [self.base.spec.zero()] * self.slots_per_unit)

    def embed(self, slot: int, x: SumVector) -> "UnitTensorVector":
        slots = [self.base.spec.zero()] * self.slots_per_unit
        slots[slot] = x
        return UnitTensorVector(self, slots)

    def probes(self, lo: int, hi: int) -> List["UnitTensorVector"]:
        """slot ℓ ⊗ base probe, base probes taken on [lo, hi)"""
        base = self.base.probes(lo, hi)
        return [self.embed(ell, x) for ell in range(self.slots_per_unit) for x in base]

    def random(self, rng: np.random.Generator, lo: int, hi: int) -> "UnitTensorVector":
        out = UnitTensorVector(self, [self.base.spec.random(rng, lo, hi, normalize=False)
                                      for _ in range(self.slots_per_unit)])
        n = out.norm()
        return out * (1.0 / n) if n > 0 else out


class UnitTensorVector:
    __slots__ = ("spec", "slots")

    def __init__(self, spec: UnitTensorSpec, slots: Sequence[SumVector]):
        if len(slots) != spec.slots_per_unit:
            raise GridSpecError(f"expected {spec.slots_per_unit} slots, got {len(slots)}")
        self.spec = spec
        self.slots = tuple(slots)

    def _map(self, fn) -> "UnitTensorVector":
        return UnitTensorVector(self.spec, [fn(x) for x in self.slots])

    def zero_like(self) -> "UnitTensorVector":
        return self.spec.zero()

    def __add__(self, other: "UnitTensorVector") -> "UnitTensorVector":
        return UnitTensorVector(self.spec, [a + b for a, b in zip(self.slots, other.slots)])

    def __sub__(self, other: "UnitTensorVector") -> "UnitTensorVector":
        return UnitTensorVector(self.spec, [a - b for a, b in zip(self.slots, other.slots)])

    def __neg__(self) -> "UnitTensorVector":
        return self._map(lambda a: -a)

    def __mul__(self, c: Scalar) -> "UnitTensorVector":
        return self._map(lambda a: c * a)

    __rmul__ = __mul__

    def right_mul(self, b: AlgebraElement) -> "UnitTensorVector":
        return self._map(lambda a: a.right_mul(b))

    def inner(self, other: "UnitTensorVector") -> AlgebraElement:
        total = AlgebraElement.zero(self.spec.signature)
        for a, b in zip(self.slots, other.slots):
            total = total + a.inner(b)
        return total * self.spec.h

    def norm(self) -> float:
        return sqrt(max(self.inner(self).norm(), 0.0))

    def is_zero(self) -> bool:
        return all(x.is_zero() for x in self.slots)


class InterleavedSemigroup(AbstractSemigroup):
    """
    s_t = (u_t ⊗ id)(1_{[0,1-r)} ⊗ s̆ⁿ + 1_{[1-r,1)} ⊗ s̆ⁿ⁺¹) for t = n + r, 0 <= r < 1

    u_t rotates the N unit slots; s̆ is the base isometry.
    """

    def __init__(self, base: StructuredIsometry, slots_per_unit: int):
        super().__init__(UnitTensorSpec(base, slots_per_unit), "s̆")
        self.base = base
        self.declared_pure = all(isinstance(p, ShiftPart) for p in base.parts)

    def at(self, t: TimeLike) -> GridOperator:
        j = slots_of(t)
        if j == 0:
            return identity()
        unit = self.slots_per_unit
        n, m = divmod(j, unit)
        low, high = self.base.power(n), self.base.power(n + 1)
        spec = self.spec

        def apply(v: UnitTensorVector) -> UnitTensorVector:
            moved = [low(x) if ell < unit - m else high(x) for ell, x in enumerate(v.slots)]
            return UnitTensorVector(spec, [moved[(ell - m) % unit] for ell in range(unit)])

        def adjoint(v: UnitTensorVector) -> UnitTensorVector:
            back = [v.slots[(ell + m) % unit] for ell in range(unit)]
            return UnitTensorVector(spec, [low.adjoint_apply(x) if ell < unit - m else high.adjoint_apply(x)
                                           for ell, x in enumerate(back)])

        return GridOperator(apply, adjoint, n + 1, f"s_{j}")

    def branch(self, r: int, t: int) -> str:
        unit = self.slots_per_unit
        return "t<=1-r" if (r % unit) + (t % unit) <= unit else "t>=1-r"

    def verify_law(self, pairs: Sequence[Tuple[int, int]], probes: Sequence[UnitTensorVector], tol: float,
                   strict: bool = False) -> Stage:
        stage = Stage("interleave")
        law: Dict[str, float] = {"t<=1-r": 0.0, "t>=1-r": 0.0}
        for r, t in pairs:
            lhs, rhs = self.at(r) @ self.at(t), self.at(r + t)
            res = max((distance(lhs(x), rhs(x)) for x in probes), default=0.0)
            branch = self.branch(r, t)
            law[branch] = max(law[branch], res)
            if strict and res > tol:
                raise InterleaveLawError(f"s_{r} s_{t} != s_{r + t} in branch {branch}: {res:.3e}")
        for branch, value in law.items():
            stage.record(f"law[{branch}]", value, tol)

        unit = self.slots_per_unit
        s_one = self.at(unit)
        base = self.base.power(1)
        stage.record("unit_time", max((distance(s_one(x), x._map(base)) for x in probes), default=0.0), tol)
        iso = 0.0
        for t in sorted({t for pair in pairs for t in pair}):
            op = self.at(t)
            for k, x in enumerate(probes):
                y = probes[(k + 1) % len(probes)]
                iso = max(iso, (op(x).inner(op(y)) - x.inner(y)).max_abs(),
                          (op(x).inner(y) - x.inner(op.adjoint_apply(y))).max_abs())
        stage.record("isometry", iso, tol)
        stage.data["pairs"] = len(pairs)
        return stage


def interleave(base: StructuredIsometry, slots_per_unit: int) -> InterleavedSemigroup:
    return InterleavedSemigroup(base, slots_per_unit)


def to_line(x: UnitTensorVector, line: GridSpec) -> GridVector:
    unit = x.spec.slots_per_unit
    mapping = {}
    for ell, v in enumerate(x.slots):
        for k, y in v.component(0).items():
            mapping[k * unit + ell] = y
    return line.from_slots(mapping)


def interleave_is_shift(fiber: FiberSpec, slots_per_unit: int, horizon: int,
                        times: Optional[Sequence[int]] = None) -> float:
    """max ‖Φ s_t x - v_t Φ x‖ for the interleaved one-sided shift, Φ the slot interleaving"""
    base = StructuredIsometry([ShiftPart(fiber)])
    s = interleave(base, slots_per_unit)
    line = GridSpec(slots_per_unit, IndexKind.UNILATERAL, fiber)
    times = range(horizon * slots_per_unit + 1) if times is None else times
    probes = s.spec.probes(0, horizon)
    worst = 0.0
    for t in times:
        op, v = s.at(t), standard_shift(line, t)
        for x in probes:
            worst = max(worst, distance(to_line(op(x), line), v(to_line(x, line))))
    return worst


@dataclass
class SequenceModuleVector:
    """
    f: {1..K} -> ℓ²(ℕ), the truncation of C_b(ℕ, H) to K points

    As a module over ℬ = ℂ^K the point k sits in block k - 1, so ‖f‖ = max_k ‖f(k)‖.
    """
    points: List[np.ndarray]

    @property
    def truncation(self) -> int:
        return len(self.points)

    def spec(self, slots_per_unit: int = 1) -> GridSpec:
        sig = AlgebraSignature((1,) * self.truncation)
        return GridSpec(slots_per_unit, IndexKind.UNILATERAL, FiberSpec(sig, 1))

    def to_grid(self, slots_per_unit: int = 1) -> GridVector:
        spec = self.spec(slots_per_unit)
        length = max((len(p) for p in self.points), default=0)
        data = []
        for p in self.points:
            col = np.zeros(length, dtype=complex)
            col[:len(p)] = p
            data.append(col[:, None, None])
        return GridVector(spec, 0, data)

    @classmethod
    def from_grid(cls, v: GridVector) -> "SequenceModuleVector":
        bounds = v.support_bounds()
        hi = 0 if bounds is None else bounds[1]
        return cls([w[:, 0, 0] for w in v.window(0, hi)])

    def norm(self, slots_per_unit: int = 1) -> float:
        return self.to_grid(slots_per_unit).norm()


def basis_sequence(truncation: int) -> SequenceModuleVector:
    points = []
    for k in range(1, truncation + 1):
        e = np.zeros(k, dtype=complex)
        e[k - 1] = 1.0
        points.append(e)
    return SequenceModuleVector(points)


def nondecex_check(truncation: int, n: int, m: int) -> float:
    """‖(r_n - r_m) f‖ in the sup-over-k norm, r_n = v̆ⁿ v̆*ⁿ and f(k) = e_k"""
    f = basis_sequence(truncation).to_grid()
    rn = standard_shift(f.spec, n) @ standard_shift(f.spec, n).adjoint()
    rm = standard_shift(f.spec, m) @ standard_shift(f.spec, m).adjoint()
    return distance(rn(f), rm(f))


def nondecex_pointwise(truncation: int, n: int) -> float:
    """max_k ‖v*ⁿ f(k)‖; each point decays to 0 although r_n f does not converge"""
    f = basis_sequence(truncation)
    decayed = SequenceModuleVector.from_grid(standard_shift(f.spec(), n).adjoint_apply(f.to_grid()))
    return max((float(np.linalg.norm(p)) for p in decayed.points), default=0.0)


def thin_indicators(truncation: int, slots_per_unit: int, y: complex = 1.0) -> GridVector:
    """g(k) = y 1_{[1/(k+1), 1/k)} normalized so that ‖g(k)‖ = |y|"""
    if slots_per_unit < truncation * (truncation + 1):
        raise GridResolutionError(f"N = {slots_per_unit} cannot resolve 1/(K(K+1)) for K = {truncation}; "
                                  f"need N >= {truncation * (truncation + 1)}")
    h = 1.0 / slots_per_unit
    points = []
    for k in range(1, truncation + 1):
        lo, hi = ceil(slots_per_unit / (k + 1)), ceil(slots_per_unit / k)
        p = np.zeros(hi, dtype=complex)
        p[lo:hi] = y / sqrt(h * (hi - lo))
        points.append(p)
    return SequenceModuleVector(points).to_grid(slots_per_unit)


def nonsc_check(truncation: int, slots_per_unit: int, t: TimeLike, y: complex = 1.0) -> float:
    """‖s̆_t g - g‖ in the sup-over-k norm"""
    g = thin_indicators(truncation, slots_per_unit, y)
    return distance(standard_shift(g.spec, t)(g), g)


def smooth_sequence(truncation: int, slots_per_unit: int) -> GridVector:
    sig = AlgebraSignature((1,) * truncation)
    spec = GridSpec(slots_per_unit, IndexKind.UNILATERAL, FiberSpec(sig, 1))
    fiber = ModuleVector(sig, 1, [np.array([[1.0 / k]]) for k in range(1, truncation + 1)])
    return sample_profile(spec, lambda x: np.sin(np.pi * x), fiber, (0, slots_per_unit))


def continuity_curve(truncation: int, slots_per_unit: int) -> List[Tuple[float, float, float]]:
    """(t, ‖s_t x - x‖ for a smooth x, ‖s_t g - g‖) at t = ⌊N/k⌋ h, k = 1..K, plus one slot"""
    g = thin_indicators(truncation, slots_per_unit)
    x = smooth_sequence(truncation, slots_per_unit)
    times = sorted({slots_per_unit // k for k in range(1, truncation + 1)} | {1}, reverse=True)
    rows = []
    for t in times:
        v = standard_shift(g.spec, t)
        rows.append((t / slots_per_unit, distance(v(x), x), distance(v(g), g)))
    return rows


def _diagonal(signature: AlgebraSignature, values: Sequence[float]) -> ModuleOperator:
    return ModuleOperator(signature, 1, 1, [np.array([[v]], dtype=complex) for v in values])


def ideal_fibers(m: int) -> Tuple[FiberSpec, FiberSpec]:
    """fibers 𝓘 and 𝓘^⊥ of ℬ = ℂ^m, 𝓘 the functions vanishing at the marked point (block 0)"""
    sig = AlgebraSignature((1,) * m)
    ideal = FiberSpec(sig, 1, _diagonal(sig, [0.0] + [1.0] * (m - 1)))
    complement = FiberSpec(sig, 1, _diagonal(sig, [1.0] + [0.0] * (m - 1)))
    return ideal, complement


def complemented_ideal_isometry(m: int) -> StructuredIsometry:
    ideal, complement = ideal_fibers(m)
    return StructuredIsometry([BilateralPart(ideal), ShiftPart(complement)])


@dataclass
class ShadowPoint:
    samples: int
    fraction: float
    complement_norm: float
    dims: Tuple[int, ...] = ()


def nonadex_shadow(m: int, t: int = 1, window: int = 4) -> ShadowPoint:
    """
    size of (s_t E)^⊥ for the complemented ideal over ℂ^m

    fraction is the share of blocks of ℬ carrying part of (s_t E)^⊥; the norm of the complement
    projection on its range stays 1.
    """
    if m < 1:
        raise GridSpecError(f"need at least one sample point, got {m}")
    s = complemented_ideal_isometry(m)
    st = s.power(t)
    complement = identity() - st @ st.adjoint()
    probes = s.probes(-window, window)
    dims = block_ranks(complement, probes, s.spec)
    fraction = sum(1 for d in dims if d) / m
    norm = max(((complement(x).norm() / x.norm()) for x in probes if x.norm() > 0), default=0.0)
    logger.debug(f"nonadex m={m}: fraction {fraction}, complement norm {norm}")
    return ShadowPoint(m, fraction, norm, dims)


def nonadex_curve(ms: Sequence[int], t: int = 1) -> List[ShadowPoint]:
    return [nonadex_shadow(m, t) for m in ms]


def nonadex_wold(m: int, window: int = 4, tol: float = 1e-10) -> DecompositionResult:
    """Wold decomposition of the complemented ideal picture; E_u is ℓ²(ℤ, 𝓘)"""
    return decompose(complemented_ideal_isometry(m), window, tol=tol)


@dataclass
class WeylResult:
    phase: complex
    expected: complex
    sign: int
    deviation: float
    spread: float
    phases: List[complex] = field(default_factory=list)


def weyl_check(slots_per_unit: int, window: int, s: int, t: float, rng: np.random.Generator,
               count: int = 10) -> WeylResult:
    """
    C = U_s m_t U_{-s} m_{-t} on random probes of [-window, window)

    With [U_s f](x) = f(x - s h) and [m_t f](x) = e^{itx} f(x) the commutator is e^{-i t s h}.
    """
    spec = GridSpec(slots_per_unit, IndexKind.BILATERAL, FiberSpec(AlgebraSignature((1,)), 1))
    commutator = (bilateral_shift(spec, s) @ multiplication_phase(spec, t) @ bilateral_shift(spec, -s)
                  @ multiplication_phase(spec, -t))
    expected = complex(np.exp(-1j * t * s * spec.h))
    phases = []
    deviation = 0.0
    for _ in range(count):
        x = spec.random(rng, -window, window)
        cx = commutator(x)
        phase = complex(x.inner(cx).blocks[0][0, 0] / x.inner(x).blocks[0][0, 0])
        phases.append(phase)
        deviation = max(deviation, abs(phase - expected), distance(cx, x * expected))
    spread = max((abs(a - b) for a in phases for b in phases), default=0.0)
    return WeylResult(phases[0] if phases else expected, expected, -1, deviation, spread, phases)


def dilation_check(slots_per_unit: int, horizon: int, rng: np.random.Generator, tol: float = 1e-12) -> Stage:
    """
    the bilateral shift dilates the standard shift

    On vectors supported in [0, ∞) the two agree; the projection onto (ũ_t E)^⊥ = 1_{(-∞,t)}
    tends to id for t -> ∞ and to 0 for t -> -∞ on probes.
    """
    stage = Stage("dilation")
    fiber = FiberSpec(AlgebraSignature((1,)), 1)
    half = GridSpec(slots_per_unit, IndexKind.UNILATERAL, fiber)
    line = GridSpec(slots_per_unit, IndexKind.BILATERAL, fiber)
    span = horizon * slots_per_unit

    def lift(f: GridVector) -> GridVector:
        return GridVector(line, f.offset, f.data)

    worst = 0.0
    for t in range(0, span + 1, max(slots_per_unit // 2, 1)):
        f = half.random(rng, 0, span)
        worst = max(worst, distance(lift(standard_shift(half, t)(f)), bilateral_shift(line, t)(lift(f))))
    stage.record("restriction", worst, tol)

    positive = indicator(line, 0, None)
    probes = [line.random(rng, -span, span) for _ in range(3)]
    curve = []
    for t in range(-2 * span, 2 * span + 1, slots_per_unit):
        u = bilateral_shift(line, t)
        complement = identity() - u @ positive @ u.adjoint()
        curve.append((t / slots_per_unit, max(complement(x).norm() for x in probes)))
    far = bilateral_shift(line, 2 * span)
    upper = identity() - far @ positive @ far.adjoint()
    stage.record("limit_plus", max(distance(upper(x), x) for x in probes), tol)
    stage.record("limit_minus", curve[0][1], tol)
    stage.data["curve"] = [list(row) for row in curve]
    return stage
