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

from dataclasses import dataclass
from enum import Enum
from math import sqrt
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from scipy.stats import unitary_group

from algebra_core import AlgebraElement, AlgebraSignature, ModuleOperator, ModuleVector, Scalar
from exceptions import GridAlignmentError, GridSpecError, ShapeMismatchError


class IndexKind(str, Enum):
    UNILATERAL = "unilateral"   # ℕ
    BILATERAL = "bilateral"     # ℤ
    CELL = "cell"               # one slot of weight 1, a finite module ℬⁿ


@dataclass(frozen=True)
class GridTime:
    slots: int

    def __post_init__(self):
        if int(self.slots) != self.slots or self.slots < 0:
            raise GridAlignmentError(f"grid times are nonnegative slot counts, got {self.slots}")
        object.__setattr__(self, "slots", int(self.slots))

    @classmethod
    def from_units(cls, value: float, slots_per_unit: int) -> "GridTime":
        slots = value * slots_per_unit
        if abs(slots - round(slots)) > 1e-9:
            raise GridAlignmentError(f"t = {value} is not a multiple of h = 1/{slots_per_unit}")
        return cls(int(round(slots)))

    def units(self, slots_per_unit: int) -> float:
        return self.slots / slots_per_unit

    def whole_units(self, slots_per_unit: int) -> int:
        """n_t, the largest integer <= t"""
        return self.slots // slots_per_unit


TimeLike = Union[GridTime, int]


def slots_of(t: Optional[TimeLike]) -> Optional[int]:
    if t is None:
        return None
    if isinstance(t, GridTime):
        return t.slots
    if int(t) != t:
        raise GridAlignmentError(f"slot index must be integral, got {t}")
    return int(t)


@dataclass(frozen=True)
class FiberSpec:
    signature: AlgebraSignature
    rank: int
    projection: Optional[ModuleOperator] = None

    def __post_init__(self):
        if self.rank < 0:
            raise GridSpecError(f"fiber rank must be >= 0, got {self.rank}")
        p = self.projection
        if p is not None and (p.signature != self.signature or p.rows != self.rank or p.cols != self.rank):
            raise GridSpecError("fiber projection does not act on the fiber")

    def project(self, x: ModuleVector) -> ModuleVector:
        return x if self.projection is None else self.projection(x)

    def generators(self) -> List[ModuleVector]:
        gens = [self.project(ModuleVector.generator(self.signature, self.rank, c)) for c in range(self.rank)]
        return [g for g in gens if not g.is_zero()]

    def random(self, rng: np.random.Generator) -> ModuleVector:
        return self.project(ModuleVector.random(self.signature, self.rank, rng))


@dataclass(frozen=True)
class GridSpec:
    slots_per_unit: int
    index_kind: IndexKind
    fiber: FiberSpec

    def __post_init__(self):
        if self.slots_per_unit < 1:
            raise GridSpecError(f"slots per unit must be >= 1, got {self.slots_per_unit}")
        object.__setattr__(self, "index_kind", IndexKind(self.index_kind))

    @property
    def h(self) -> float:
        return 1.0 / self.slots_per_unit

    @property
    def weight(self) -> float:
        return 1.0 if self.index_kind == IndexKind.CELL else self.h

    @property
    def signature(self) -> AlgebraSignature:
        return self.fiber.signature

    def legal(self, lo: int, hi: Optional[int]) -> Tuple[int, Optional[int]]:
        if self.index_kind == IndexKind.UNILATERAL:
            lo = max(lo, 0)
        elif self.index_kind == IndexKind.CELL:
            lo, hi = max(lo, 0), (1 if hi is None else min(hi, 1))
        if hi is not None and hi < lo:
            hi = lo
        return lo, hi

    def zero(self) -> "GridVector":
        return GridVector(self, 0, [np.zeros((0, self.fiber.rank * d, d), dtype=complex) for d in self.signature])

    def slot_vector(self, j: int, x: ModuleVector) -> "GridVector":
        if x.signature != self.signature or x.rank != self.fiber.rank:
            raise ShapeMismatchError(f"fiber vector {x} does not fit {self}")
        lo, hi = self.legal(j, j + 1)
        if hi <= lo:
            raise GridSpecError(f"slot {j} is not in the {self.index_kind.value} index set")
        return GridVector(self, j, [c[None] for c in x.columns])

    def from_slots(self, mapping: Dict[int, ModuleVector]) -> "GridVector":
        out = self.zero()
        for j in sorted(mapping):
            out = out + self.slot_vector(j, mapping[j])
        return out

    def probes(self, lo: int, hi: int) -> List["GridVector"]:
        """slot basis ⊗ fiber generators of the vectors supported in [lo, hi)"""
        lo, hi = self.legal(lo, hi)
        gens = self.fiber.generators()
        return [self.slot_vector(j, g) for j in range(lo, hi) for g in gens]

    def random(self, rng: np.random.Generator, lo: int, hi: int, normalize: bool = True) -> "GridVector":
        lo, hi = self.legal(lo, hi)
        length = hi - lo
        r = self.fiber.rank
        data = [(rng.standard_normal((length, r * d, d)) + 1j * rng.standard_normal((length, r * d, d))) / sqrt(2)
                for d in self.signature]
        out = GridVector(self, lo, data)
        if self.fiber.projection is not None:
            out = out.map_fiber(self.fiber.projection)
        if normalize:
            n = out.norm()
            if n > 0:
                out = out * (1.0 / n)
        return out

    def window_rank(self, lo: int, hi: int) -> int:
        lo, hi = self.legal(lo, hi)
        return (hi - lo) * self.fiber.rank

    def flatten(self, v: "GridVector", lo: int, hi: int) -> ModuleVector:
        """slot window [lo, hi) as one ModuleVector with the same ℬ-valued inner product"""
        lo, hi = self.legal(lo, hi)
        scale = sqrt(self.weight)
        cols = [scale * w.reshape(-1, d) for w, d in zip(v.window(lo, hi), self.signature)]
        return ModuleVector(self.signature, (hi - lo) * self.fiber.rank, cols)

    def unflatten(self, x: ModuleVector, lo: int, hi: int) -> "GridVector":
        lo, hi = self.legal(lo, hi)
        if x.rank != (hi - lo) * self.fiber.rank:
            raise ShapeMismatchError(f"rank {x.rank} does not match window [{lo}, {hi})")
        scale = 1.0 / sqrt(self.weight)
        r = self.fiber.rank
        return GridVector(self, lo, [scale * c.reshape(hi - lo, r * d, d) for c, d in zip(x.columns, self.signature)])


class GridVector:
    """
    finitely supported slot -> fiber map, stored densely on [offset, offset + length)

    Block i of the data has shape (length, rank·n_i, n_i); slot j is the ModuleVector whose
    column stack is data[i][j - offset]. ⟨f, g⟩ = weight · Σ_j ⟨f_j, g_j⟩.
    """
    __slots__ = ("spec", "offset", "data")

    def __init__(self, spec: GridSpec, offset: int, data: Sequence[np.ndarray]):
        data = tuple(np.asarray(a, dtype=complex) for a in data)
        lengths = {a.shape[0] for a in data}
        if len(lengths) != 1:
            raise ShapeMismatchError("all blocks must cover the same slots")
        for a, d in zip(data, spec.signature):
            if a.shape[1:] != (spec.fiber.rank * d, d):
                raise ShapeMismatchError(f"slot data of shape {a.shape[1:]} does not fit {spec.fiber}")
        self.spec = spec
        self.offset = int(offset)
        self.data = data

    @property
    def length(self) -> int:
        return self.data[0].shape[0]

    @property
    def end(self) -> int:
        return self.offset + self.length

    def window(self, lo: int, hi: int) -> List[np.ndarray]:
        out = []
        s, e = max(lo, self.offset), min(hi, self.end)
        for a in self.data:
            w = np.zeros((hi - lo,) + a.shape[1:], dtype=complex)
            if e > s:
                w[s - lo:e - lo] = a[s - self.offset:e - self.offset]
            out.append(w)
        return out

    def zero_like(self) -> "GridVector":
        return self.spec.zero()

    def _combine(self, other: "GridVector", sign: int) -> "GridVector":
        if other.spec != self.spec:
            raise ShapeMismatchError("vectors live on different grids")
        if other.length == 0:
            return self
        if self.length == 0:
            return other if sign > 0 else -other
        lo, hi = min(self.offset, other.offset), max(self.end, other.end)
        return GridVector(self.spec, lo, [a + sign * b for a, b in zip(self.window(lo, hi), other.window(lo, hi))])

    def __add__(self, other: "GridVector") -> "GridVector":
        return self._combine(other, 1)

    def __sub__(self, other: "GridVector") -> "GridVector":
        return self._combine(other, -1)

    def __neg__(self) -> "GridVector":
        return GridVector(self.spec, self.offset, [-a for a in self.data])

    def __mul__(self, c: Scalar) -> "GridVector":
        return GridVector(self.spec, self.offset, [c * a for a in self.data])

    __rmul__ = __mul__

    def right_mul(self, b: AlgebraElement) -> "GridVector":
        return GridVector(self.spec, self.offset, [a @ bb for a, bb in zip(self.data, b.blocks)])

    def map_fiber(self, op: ModuleOperator) -> "GridVector":
        if op.rows != self.spec.fiber.rank or op.cols != self.spec.fiber.rank:
            raise ShapeMismatchError(f"fiber operator {op} does not act on {self.spec.fiber}")
        return GridVector(self.spec, self.offset, [np.einsum("ij,ljd->lid", b, a) for b, a in zip(op.blocks, self.data)])

    def inner(self, other: "GridVector") -> AlgebraElement:
        if other.spec != self.spec:
            raise ShapeMismatchError("vectors live on different grids")
        s, e = max(self.offset, other.offset), min(self.end, other.end)
        blocks = []
        for a, b, d in zip(self.data, other.data, self.spec.signature):
            if e > s:
                x = a[s - self.offset:e - self.offset]
                y = b[s - other.offset:e - other.offset]
                blocks.append(self.spec.weight * np.einsum("lrd,lre->de", x.conj(), y))
            else:
                blocks.append(np.zeros((d, d), dtype=complex))
        return AlgebraElement(self.spec.signature, blocks)

    def norm(self) -> float:
        return sqrt(max(self.inner(self).norm(), 0.0))

    def restrict(self, lo: int, hi: Optional[int]) -> "GridVector":
        s = max(lo, self.offset)
        e = self.end if hi is None else min(hi, self.end)
        if e <= s:
            return self.zero_like()
        return GridVector(self.spec, s, [a[s - self.offset:e - self.offset] for a in self.data])

    def shifted(self, k: int) -> "GridVector":
        if self.spec.index_kind == IndexKind.CELL:
            raise GridSpecError("a cell has no translations")
        out = GridVector(self.spec, self.offset + k, self.data)
        if self.spec.index_kind == IndexKind.UNILATERAL and out.offset < 0:
            out = out.restrict(0, None)
        return out

    def rotated(self, lo: int, hi: int, m: int) -> "GridVector":
        """rotate the slots of [lo, hi) by m modulo hi - lo, identity elsewhere"""
        inside = self.restrict(lo, hi)
        if inside.length == 0:
            return self
        rolled = GridVector(self.spec, lo, [np.roll(w, m, axis=0) for w in inside.window(lo, hi)])
        return self - inside + rolled

    def phased(self, t: float) -> "GridVector":
        """slot j times e^{i t x_j}, x_j = j h"""
        if self.spec.index_kind == IndexKind.CELL or self.length == 0:
            return self
        x = np.arange(self.offset, self.end) * self.spec.h
        factors = np.exp(1j * t * x)[:, None, None]
        return GridVector(self.spec, self.offset, [factors * a for a in self.data])

    def slot(self, j: int) -> ModuleVector:
        cols = [w[0] for w in self.window(j, j + 1)]
        return ModuleVector(self.spec.signature, self.spec.fiber.rank, cols)

    def _mask(self) -> np.ndarray:
        mask = np.zeros(self.length, dtype=bool)
        for a in self.data:
            mask |= np.any(a != 0, axis=(1, 2))
        return mask

    def support_bounds(self) -> Optional[Tuple[int, int]]:
        idx = np.flatnonzero(self._mask())
        if idx.size == 0:
            return None
        return self.offset + int(idx[0]), self.offset + int(idx[-1]) + 1

    def items(self) -> Iterable[Tuple[int, ModuleVector]]:
        for k in np.flatnonzero(self._mask()):
            yield self.offset + int(k), self.slot(self.offset + int(k))

    def is_zero(self) -> bool:
        return self.support_bounds() is None

    def __repr__(self):
        return f"GridVector({self.spec.index_kind.value}, N={self.spec.slots_per_unit}, support={self.support_bounds()})"


@dataclass(frozen=True)
class SumSpec:
    """orthogonal direct sum of grid spaces over one algebra"""
    parts: Tuple[GridSpec, ...]

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise GridSpecError("a direct sum needs at least one part")
        if len({p.signature for p in parts}) != 1:
            raise GridSpecError("all parts must be modules over the same algebra")
        if len({p.slots_per_unit for p in parts if p.index_kind != IndexKind.CELL}) > 1:
            raise GridSpecError("all line parts must share the grid step")
        object.__setattr__(self, "parts", parts)

    @property
    def slots_per_unit(self) -> int:
        lines = [p.slots_per_unit for p in self.parts if p.index_kind != IndexKind.CELL]
        return lines[0] if lines else 1

    @property
    def h(self) -> float:
        return 1.0 / self.slots_per_unit

    @property
    def signature(self) -> AlgebraSignature:
        return self.parts[0].signature

    def zero(self) -> "SumVector":
        return SumVector(self, [p.zero() for p in self.parts])

    def embed(self, k: int, v: GridVector) -> "SumVector":
        comps = [p.zero() for p in self.parts]
        comps[k] = v
        return SumVector(self, comps)

    def probes(self, lo: int, hi: int) -> List["SumVector"]:
        return [self.embed(k, v) for k, p in enumerate(self.parts) for v in p.probes(lo, hi)]

    def random(self, rng: np.random.Generator, lo: int, hi: int, normalize: bool = True) -> "SumVector":
        out = SumVector(self, [p.random(rng, lo, hi, normalize=False) for p in self.parts])
        n = out.norm()
        return out * (1.0 / n) if normalize and n > 0 else out

    def window_rank(self, lo: int, hi: int) -> int:
        return sum(p.window_rank(lo, hi) for p in self.parts)

    def flatten(self, v: "SumVector", lo: int, hi: int) -> ModuleVector:
        flat = [p.flatten(c, lo, hi) for p, c in zip(self.parts, v.components)]
        cols = [np.vstack([f.columns[i] for f in flat]) for i in range(len(self.signature))]
        return ModuleVector(self.signature, sum(f.rank for f in flat), cols)

    def unflatten(self, x: ModuleVector, lo: int, hi: int) -> "SumVector":
        comps, start = [], 0
        for p in self.parts:
            r = p.window_rank(lo, hi)
            cols = [c[start * d:(start + r) * d] for c, d in zip(x.columns, self.signature)]
            comps.append(p.unflatten(ModuleVector(self.signature, r, cols), lo, hi))
            start += r
        if start != x.rank:
            raise ShapeMismatchError(f"rank {x.rank} does not match window [{lo}, {hi})")
        return SumVector(self, comps)


class SumVector:
    __slots__ = ("spec", "components")

    def __init__(self, spec: SumSpec, components: Sequence[GridVector]):
        components = tuple(components)
        if len(components) != len(spec.parts):
            raise ShapeMismatchError(f"expected {len(spec.parts)} components, got {len(components)}")
        self.spec = spec
        self.components = components

    def _map(self, fn: Callable[[GridVector], GridVector]) -> "SumVector":
        return SumVector(self.spec, [fn(c) for c in self.components])

    def _zip(self, other: "SumVector", fn) -> "SumVector":
        if other.spec != self.spec:
            raise ShapeMismatchError("vectors live on different direct sums")
        return SumVector(self.spec, [fn(a, b) for a, b in zip(self.components, other.components)])

    def zero_like(self) -> "SumVector":
        return self.spec.zero()

    def component(self, k: int) -> GridVector:
        return self.components[k]

    def __add__(self, other: "SumVector") -> "SumVector":
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other: "SumVector") -> "SumVector":
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self) -> "SumVector":
        return self._map(lambda a: -a)

    def __mul__(self, c: Scalar) -> "SumVector":
        return self._map(lambda a: c * a)

    __rmul__ = __mul__

    def right_mul(self, b: AlgebraElement) -> "SumVector":
        return self._map(lambda a: a.right_mul(b))

    def inner(self, other: "SumVector") -> AlgebraElement:
        if other.spec != self.spec:
            raise ShapeMismatchError("vectors live on different direct sums")
        total = AlgebraElement.zero(self.spec.signature)
        for a, b in zip(self.components, other.components):
            total = total + a.inner(b)
        return total

    def norm(self) -> float:
        return sqrt(max(self.inner(self).norm(), 0.0))

    def restrict(self, lo: int, hi: Optional[int]) -> "SumVector":
        return self._map(lambda a: a.restrict(lo, hi))

    def rotated(self, lo: int, hi: int, m: int) -> "SumVector":
        return self._map(lambda a: a.rotated(lo, hi, m))

    def phased(self, t: float) -> "SumVector":
        return self._map(lambda a: a.phased(t))

    def support_bounds(self) -> Optional[Tuple[int, int]]:
        bounds = [b for b in (c.support_bounds() for c in self.components) if b is not None]
        if not bounds:
            return None
        return min(b[0] for b in bounds), max(b[1] for b in bounds)

    def is_zero(self) -> bool:
        return self.support_bounds() is None

    def __repr__(self):
        return f"SumVector({len(self.components)} parts, support={self.support_bounds()})"


Space = Union[GridSpec, SumSpec]
Vector = Union[GridVector, SumVector]


class GridOperator:
    """
    adjointable operator given as an apply/adjoint-apply pair

    `propagation` bounds how far supports move: supp(Tf) ⊆ supp(f) + [-k, k].
    """
    __slots__ = ("_apply", "_adjoint", "propagation", "name")

    def __init__(self, apply: Callable[[Vector], Vector], adjoint_apply: Callable[[Vector], Vector],
                 propagation: int = 0, name: str = "T"):
        if propagation < 0:
            raise GridSpecError(f"propagation must be >= 0, got {propagation}")
        self._apply = apply
        self._adjoint = adjoint_apply
        self.propagation = int(propagation)
        self.name = name

    def __call__(self, v: Vector) -> Vector:
        return self._apply(v)

    def apply(self, v: Vector) -> Vector:
        return self._apply(v)

    def adjoint_apply(self, v: Vector) -> Vector:
        return self._adjoint(v)

    def adjoint(self) -> "GridOperator":
        return GridOperator(self._adjoint, self._apply, self.propagation, f"({self.name})†")

    def __matmul__(self, other: "GridOperator") -> "GridOperator":
        first, second = other, self
        return GridOperator(lambda v: second._apply(first._apply(v)),
                            lambda v: first._adjoint(second._adjoint(v)),
                            self.propagation + other.propagation, f"{self.name}∘{other.name}")

    def __add__(self, other: "GridOperator") -> "GridOperator":
        return combination([self, other], name=f"{self.name}+{other.name}")

    def __sub__(self, other: "GridOperator") -> "GridOperator":
        return combination([self, other], [1.0, -1.0], name=f"{self.name}-{other.name}")

    def __mul__(self, c: Scalar) -> "GridOperator":
        return combination([self], [c], name=f"{c}·{self.name}")

    __rmul__ = __mul__

    def __neg__(self) -> "GridOperator":
        return combination([self], [-1.0], name=f"-{self.name}")

    def __repr__(self):
        return f"GridOperator({self.name}, propagation={self.propagation})"


def combination(ops: Sequence[GridOperator], coefficients: Optional[Sequence[Scalar]] = None,
                name: str = "Σ") -> GridOperator:
    """Σ c_k T_k, evaluated in list order"""
    ops = list(ops)
    coefficients = [1.0] * len(ops) if coefficients is None else list(coefficients)
    if len(coefficients) != len(ops):
        raise ShapeMismatchError("one coefficient per operator")
    conj = [complex(c).conjugate() if isinstance(c, complex) else c for c in coefficients]

    def run(v, which, coeffs):
        out = v.zero_like()
        for op, c in zip(ops, coeffs):
            w = op._apply(v) if which else op._adjoint(v)
            out = out + (w if c == 1.0 else c * w)
        return out

    return GridOperator(lambda v: run(v, True, coefficients), lambda v: run(v, False, conj),
                        max((op.propagation for op in ops), default=0), name)


def identity() -> GridOperator:
    return GridOperator(lambda v: v, lambda v: v, 0, "id")


def zero_operator() -> GridOperator:
    return GridOperator(lambda v: v.zero_like(), lambda v: v.zero_like(), 0, "0")


def _line_spec(spec: Space, kind: IndexKind, what: str) -> GridSpec:
    if not isinstance(spec, GridSpec) or spec.index_kind != kind:
        raise GridSpecError(f"{what} needs a {kind.value} grid")
    return spec


def standard_shift(spec: GridSpec, t: TimeLike) -> GridOperator:
    """[v_t f](x) = f(x - t) on a unilateral grid; the adjoint shifts down and drops slots below 0"""
    _line_spec(spec, IndexKind.UNILATERAL, "standard_shift")
    j = slots_of(t)
    if j < 0:
        raise GridAlignmentError(f"semigroup times are nonnegative, got {j}")
    if j == 0:
        return identity()
    return GridOperator(lambda v: v.shifted(j), lambda v: v.shifted(-j), j, f"v_{j}")


def bilateral_shift(spec: GridSpec, t: int) -> GridOperator:
    _line_spec(spec, IndexKind.BILATERAL, "bilateral_shift")
    j = slots_of(t)
    if j == 0:
        return identity()
    return GridOperator(lambda v: v.shifted(j), lambda v: v.shifted(-j), abs(j), f"u_{j}")


def indicator(spec: Space, a: TimeLike, b: Optional[TimeLike]) -> GridOperator:
    """multiplication by 1_[a, b); b = None is ∞, a > b gives the zero operator"""
    lo, hi = slots_of(a), slots_of(b)
    if hi is not None and lo > hi:
        return zero_operator()
    restrict = lambda v: v.restrict(lo, hi)
    return GridOperator(restrict, restrict, 0, f"1[{lo},{'∞' if hi is None else hi})")


def cyclic_shift(spec: Space, a: TimeLike, b: TimeLike, t: TimeLike) -> GridOperator:
    """π_t on the window [a, b): rotation by t mod (b - a), identity off the window"""
    lo, hi = slots_of(a), slots_of(b)
    if hi <= lo:
        raise GridSpecError(f"cyclic shift needs a < b, got [{lo}, {hi})")
    period = hi - lo
    m = slots_of(t) % period
    if m == 0:
        return identity()
    return GridOperator(lambda v: v.rotated(lo, hi, m), lambda v: v.rotated(lo, hi, -m),
                        period - 1, f"π_{m}[{lo},{hi})")


def multiplication_phase(spec: Space, t: float) -> GridOperator:
    """[m_t f](x_j) = e^{i t x_j} f(x_j)"""
    if t == 0:
        return identity()
    return GridOperator(lambda v: v.phased(t), lambda v: v.phased(-t), 0, f"m_{t:g}")


def sample_profile(spec: GridSpec, profile: Callable[[float], Scalar], fiber_vector: ModuleVector,
                   window: Tuple[TimeLike, TimeLike]) -> GridVector:
    """slot j of [a, b) carries profile(x_j) · fiber_vector"""
    lo, hi = spec.legal(slots_of(window[0]), slots_of(window[1]))
    if hi <= lo:
        raise GridSpecError(f"sampling window must be nonempty, got [{lo}, {hi})")
    if fiber_vector.signature != spec.signature or fiber_vector.rank != spec.fiber.rank:
        raise ShapeMismatchError(f"fiber vector {fiber_vector} does not fit {spec.fiber}")
    values = np.array([profile(j * spec.h) for j in range(lo, hi)], dtype=complex)
    return GridVector(spec, lo, [values[:, None, None] * c[None] for c in fiber_vector.columns])


def direct_sum(spec: SumSpec, ops: Sequence[GridOperator]) -> GridOperator:
    ops = list(ops)
    if len(ops) != len(spec.parts):
        raise ShapeMismatchError(f"expected {len(spec.parts)} operators, got {len(ops)}")
    return GridOperator(lambda v: SumVector(spec, [op(c) for op, c in zip(ops, v.components)]),
                        lambda v: SumVector(spec, [op.adjoint_apply(c) for op, c in zip(ops, v.components)]),
                        max(op.propagation for op in ops), "⊕".join(op.name for op in ops))


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    if dim == 0:
        return np.zeros((0, 0), dtype=complex)
    if dim == 1:
        return np.array([[np.exp(2j * np.pi * rng.random())]])
    return unitary_group.rvs(dim, random_state=rng)


def random_module_unitary(signature: AlgebraSignature, rank: int, rng: np.random.Generator) -> ModuleOperator:
    return ModuleOperator(signature, rank, rank, [haar_unitary(rank * d, rng) for d in signature])


def window_unitary(spec: Space, rng: np.random.Generator, lo: int, hi: int) -> GridOperator:
    """
    seeded Haar-random module unitary mixing all slots of [lo, hi), identity elsewhere

    Used to disguise a semigroup; it is ℬ-linear because it acts by left multiplication
    on the flattened window.
    """
    r = spec.window_rank(lo, hi)
    u = random_module_unitary(spec.signature, r, rng)
    u_star = u.adjoint()
    logger.debug(f"disguise unitary on slots [{lo}, {hi}), module rank {r}")

    def run(op):
        def go(v):
            flat = spec.flatten(v, lo, hi)
            return v - v.restrict(lo, hi) + spec.unflatten(op(flat), lo, hi)
        return go

    return GridOperator(run(u), run(u_star), max(hi - lo - 1, 0), f"V[{lo},{hi})")


def distance(x: Vector, y: Vector) -> float:
    return (x - y).norm()


def operator_residual(a: GridOperator, b: GridOperator, probes: Iterable[Vector]) -> float:
    return max((distance(a(x), b(x)) for x in probes), default=0.0)


def adjoint_pairing_residual(op: GridOperator, f: Vector, g: Vector) -> float:
    """entrywise size of ⟨T f, g⟩ - ⟨f, T† g⟩"""
    return (op(f).inner(g) - f.inner(op.adjoint_apply(g))).max_abs()


def propagation_respected(op: GridOperator, probes: Iterable[Vector]) -> bool:
    k = op.propagation
    for x in probes:
        src, dst = x.support_bounds(), op(x).support_bounds()
        if src is None or dst is None:
            continue
        if dst[0] < src[0] - k or dst[1] > src[1] + k:
            return False
    return True
