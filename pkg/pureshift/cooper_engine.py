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
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from algebra_core import ModuleOperator, ModuleVector, frame_dims, range_frame
from exceptions import (AdjointPairingError, DegenerateMultiplicityError, DivisibilityError, GridSpecError,
                        GroupLawError, HorizonError, PureShiftException, WindowMembershipError)
from grid_model import (FiberSpec, GridOperator, GridSpec, GridVector, IndexKind, TimeLike, Vector,
                        adjoint_pairing_residual, combination, cyclic_shift, distance, slots_of,
                        standard_shift, zero_operator)
from helpers import overlap
from residuals import Stage
from semigroup_base import AbstractSemigroup
from semigroups import check_semigroup


def _range_projection(s: AbstractSemigroup, t: int) -> GridOperator:
    op = s.at(t)
    return op @ op.adjoint()


def _pab(s: AbstractSemigroup, a: int, b: Optional[int]) -> GridOperator:
    if b is not None and a >= b:
        return zero_operator()
    if b is None:
        return _range_projection(s, a)
    return _range_projection(s, a) - _range_projection(s, b)


@dataclass
class IntervalProjection:
    a: int
    b: Optional[int]
    operator: GridOperator

    def __call__(self, x: Vector) -> Vector:
        return self.operator(x)


def interval_projection(s: AbstractSemigroup, a: TimeLike, b: Optional[TimeLike],
                        probes: Sequence[Vector] = (), tol: Optional[float] = None) -> IntervalProjection:
    """
    p_{a,b} = s_a s_a† - s_b s_b†, with p_{a,∞} = s_a s_a† and p_{a,b} = 0 for a >= b

    With probes and a tolerance the adjoint pairing of s_a and s_b is checked first.
    """
    lo, hi = slots_of(a), slots_of(b)
    if tol is not None:
        for t in (lo, hi):
            if t is None:
                continue
            op = s.at(t)
            worst = max((adjoint_pairing_residual(op, x, y) for x, y in zip(probes, probes[1:] + probes[:1])),
                        default=0.0)
            if worst > tol:
                raise AdjointPairingError(f"s_{t} fails the adjoint pairing: {worst:.3e} > {tol:.1e}")
    return IntervalProjection(lo, hi, _pab(s, lo, hi))


def _cap(x: Optional[int]) -> Optional[int]:
    return None if x is None else max(x, 0)


def sample_tuples(rng: np.random.Generator, span: int, count: int) -> List[Tuple[int, ...]]:
    return [tuple(int(v) for v in rng.integers(0, span + 1, size=5)) for _ in range(count)]


def verify_pab_calculus(s: AbstractSemigroup, samples: Sequence[Tuple[int, ...]], probes: Sequence[Vector],
                        tol: float) -> Stage:
    """projection calculus of p_{a,b} and the unitary restriction E_{a,b} -> E_{a+t,b+t}"""
    stage = Stage("pab")
    worst: Dict[str, float] = {k: 0.0 for k in ("product", "shift_left", "shift_right", "coshift_left",
                                                "coshift_right", "additivity", "abshift_isometry",
                                                "abshift_onto")}

    def bump(key, lhs, rhs):
        worst[key] = max(worst[key], max((distance(lhs(x), rhs(x)) for x in probes), default=0.0))

    for t, a, b, c, d in samples:
        st = s.at(t)
        st_star = st.adjoint()
        p_ab = _pab(s, a, b)

        bump("product", p_ab @ _pab(s, c, d), _pab(s, max(a, c), min(b, d)))
        bump("shift_left", st @ p_ab, _pab(s, a + t, b + t) @ st)
        bump("shift_right", p_ab @ st, st @ _pab(s, max(a - t, 0), max(b - t, 0)))
        bump("coshift_left", st_star @ p_ab, _pab(s, max(a - t, 0), max(b - t, 0)) @ st_star)
        bump("coshift_right", p_ab @ st_star, st_star @ _pab(s, a + t, b + t))

        x0, x1, x2 = sorted((a, b, c))
        bump("additivity", _pab(s, x0, x1) + _pab(s, x1, x2), _pab(s, x0, x2))

        p_shift = _pab(s, a + t, b + t)
        restricted = p_shift @ st @ p_ab
        for k, x in enumerate(probes):
            y, y2 = p_ab(x), p_ab(probes[(k + 1) % len(probes)])
            gap = (restricted(y).inner(restricted(y2)) - y.inner(y2)).max_abs()
            worst["abshift_isometry"] = max(worst["abshift_isometry"], gap)
            z = p_shift(x)
            worst["abshift_onto"] = max(worst["abshift_onto"], distance(st(p_ab(st_star(z))), z))

    for key, value in worst.items():
        stage.record(key, value, tol)
    stage.data["samples"] = len(samples)
    return stage


class WindowGroup:
    """
    u_t on E_{a,b}: u_t = s_t p_{a,b-t} + s†_{L-t} p_{b-t,b} with L = b - a, periodic in t mod L

    u_0 acts as p_{a,b}.
    """

    def __init__(self, s: AbstractSemigroup, a: TimeLike, b: TimeLike):
        self.s = s
        self.a, self.b = slots_of(a), slots_of(b)
        if self.b <= self.a:
            raise GridSpecError(f"window group needs a < b, got [{self.a}, {self.b})")
        self.period = self.b - self.a
        self.projection = _pab(s, self.a, self.b)

    def at(self, t: TimeLike) -> GridOperator:
        m = slots_of(t) % self.period
        if m == 0:
            return self.projection
        a, b, length = self.a, self.b, self.period
        return (self.s.at(m) @ _pab(self.s, a, b - m)) + (self.s.at(length - m).adjoint() @ _pab(self.s, b - m, b))

    def branch(self, r: int, t: int) -> str:
        return "r+t<L" if (r % self.period) + (t % self.period) < self.period else "r+t>=L"

    def law_residual(self, r: int, t: int, probes: Sequence[Vector]) -> float:
        lhs, rhs = self.at(r) @ self.at(t), self.at(r + t)
        return max((distance(lhs(x), rhs(x)) for x in probes), default=0.0)

    def unitarity_residual(self, t: int, probes: Sequence[Vector]) -> float:
        """u_t† u_t = u_t u_t† = p_{a,b} on E_{a,b}, checked ℬ-valued for the isometry part"""
        u = self.at(t)
        worst = 0.0
        for k, x in enumerate(probes):
            y, y2 = self.projection(x), self.projection(probes[(k + 1) % len(probes)])
            worst = max(worst, (u(y).inner(u(y2)) - y.inner(y2)).max_abs(),
                        distance(u(u.adjoint_apply(y)), y))
        return worst

    def continuity_residual(self, x: Vector) -> float:
        """largest jump ‖u_{t+h} x - u_t x‖ over one period, wrap-around included"""
        images = [self.at(t)(x) for t in range(self.period)] + [self.projection(x)]
        return max(distance(u, v) for u, v in zip(images, images[1:]))

    def verify(self, pairs: Sequence[Tuple[int, int]], probes: Sequence[Vector], tol: float,
               strict: bool = False) -> Stage:
        stage = Stage("window_group")
        law: Dict[str, float] = {"r+t<L": 0.0, "r+t>=L": 0.0}
        worst_pair = None
        for r, t in pairs:
            res = self.law_residual(r, t, probes)
            branch = self.branch(r, t)
            if res > law[branch]:
                law[branch] = res
            if res > tol:
                worst_pair = (r, t)
                if strict:
                    raise GroupLawError(f"u_{r} u_{t} != u_{r + t} on [{self.a}, {self.b}) ({branch}): {res:.3e}")
        for branch, value in law.items():
            stage.record(f"law[{branch}]", value, tol)
        times = sorted({t % self.period for pair in pairs for t in pair})
        stage.record("unitarity", max((self.unitarity_residual(t, probes) for t in times), default=0.0), tol)
        stage.record("identity", max((distance(self.at(0)(x), self.projection(x)) for x in probes), default=0.0),
                     tol)
        if worst_pair is not None:
            stage.data["failing_pair"] = list(worst_pair)
        stage.data["pairs"] = len(pairs)
        return stage


def window_group(s: AbstractSemigroup, a: TimeLike, b: TimeLike) -> WindowGroup:
    return WindowGroup(s, a, b)


def averaging_projection(s: AbstractSemigroup, a: TimeLike, b: TimeLike) -> GridOperator:
    """q_{a,b}: the exact mean of u_t over the (b - a) grid times of one period"""
    group = WindowGroup(s, a, b)
    length = group.period
    op = combination([group.at(t) for t in range(length)], [1.0 / length] * length,
                     name=f"q[{group.a},{group.b})")
    return op


def verify_averaging(s: AbstractSemigroup, windows: Sequence[Tuple[int, int]], probes: Sequence[Vector],
                     tol: float) -> Stage:
    stage = Stage("averaging")
    worst = {"idempotent": 0.0, "selfadjoint": 0.0, "subprojection": 0.0, "invariance": 0.0}
    for a, b in windows:
        q = averaging_projection(s, a, b)
        p = _pab(s, a, b)
        group = WindowGroup(s, a, b)
        for k, x in enumerate(probes):
            qx = q(x)
            y = probes[(k + 1) % len(probes)]
            worst["idempotent"] = max(worst["idempotent"], distance(q(qx), qx))
            worst["selfadjoint"] = max(worst["selfadjoint"], (qx.inner(y) - x.inner(q(y))).max_abs())
            worst["subprojection"] = max(worst["subprojection"], distance(p(qx), qx), distance(q(p(x)), qx))
            r = 1 + k % max(group.period - 1, 1)
            worst["invariance"] = max(worst["invariance"], distance(group.at(r)(qx), qx))
    for key, value in worst.items():
        stage.record(key, value, tol)
    return stage


@dataclass
class ConvergenceTable:
    n_values: List[int]
    residuals: List[float]
    witnesses: List[float]

    def monotone_violation(self) -> float:
        """largest increase r_{n'} - r_n over pairs with n | n'"""
        worst = 0.0
        for i, n in enumerate(self.n_values):
            for j, m in enumerate(self.n_values):
                if m > n and m % n == 0:
                    worst = max(worst, self.residuals[j] - self.residuals[i])
        return worst

    def bound_violation(self) -> float:
        return max((r - w for r, w in zip(self.residuals, self.witnesses)), default=0.0)

    def rows(self) -> List[Tuple[int, float, float]]:
        return list(zip(self.n_values, self.residuals, self.witnesses))


def limit_convergence(s: AbstractSemigroup, x: Vector, n_values: Sequence[int],
                      membership_tol: float = 1e-10) -> ConvergenceTable:
    """
    r_n = ‖Σ_k q_{(k-1)/n, k/n} x - x‖ for x in E_{0,1}

    The witness sup_τ ‖s_τ x - x‖ + sup_τ ‖s_τ† x - x‖ over τ <= 1/n bounds r_n.
    """
    slots = s.slots_per_unit
    for n in n_values:
        if n < 1 or slots % n:
            raise DivisibilityError(f"n = {n} does not divide N = {slots}")
    gap = distance(_pab(s, 0, slots)(x), x)
    if gap > membership_tol:
        raise WindowMembershipError(f"vector is not in E_{{0,1}}: ‖p_{{0,1}} x - x‖ = {gap:.3e}")

    shifts = [distance(s.at(tau)(x), x) for tau in range(slots + 1)]
    coshifts = [distance(s.at(tau).adjoint_apply(x), x) for tau in range(slots + 1)]

    residuals, witnesses = [], []
    for n in n_values:
        width = slots // n
        total = x.zero_like()
        for k in range(n):
            total = total + averaging_projection(s, k * width, (k + 1) * width)(x)
        residuals.append(distance(total, x))
        witnesses.append(max(shifts[:width + 1]) + max(coshifts[:width + 1]))
        logger.debug(f"limit n={n}: r={residuals[-1]:.3e} witness={witnesses[-1]:.3e}")
    return ConvergenceTable(list(n_values), residuals, witnesses)


def divisors(n: int) -> List[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def verify_q_relations(s: AbstractSemigroup, zs: Sequence[Vector], ws: Sequence[Vector],
                       samples: Sequence[Tuple[int, ...]], probes: Sequence[Vector], tol: float) -> Stage:
    """
    relations of the averaging projections

    zs and ws must lie in q_{0,1}E; samples are (r, a, b, c, d) slot tuples, folded into the
    ranges each relation needs.
    """
    stage = Stage("q_relations")
    unit = s.slots_per_unit
    worst = {k: 0.0 for k in ("shift_chain", "shift_commute", "additivity", "lebesgue", "ratio")}

    for r, a, b, c, d in samples:
        a, b = min(a, b), max(a, b) + 1
        length = b - a
        rr = r % (length + 1)
        q = averaging_projection(s, a, b)
        group = WindowGroup(s, a, b)
        sr = s.at(rr)
        tail = _pab(s, a + rr, b)
        for x in probes:
            qx = q(x)
            target = tail(qx)
            worst["shift_chain"] = max(worst["shift_chain"],
                                       distance(sr(_pab(s, a, b - rr)(qx)), target),
                                       distance(tail(sr(qx)), target),
                                       distance(tail(group.at(rr)(qx)), target))
            worst["shift_commute"] = max(worst["shift_commute"],
                                         distance(sr(qx), averaging_projection(s, a + rr, b + rr)(sr(x))))

        # nested [c', d') ⊆ [a, b)
        lo, hi = sorted((a + c % length, a + d % length))
        hi = hi + 1 if hi == lo else hi
        hi = min(hi, b)
        p_cd = _pab(s, lo, hi)
        q_cd = averaging_projection(s, lo, hi)
        factor = (hi - lo) / length
        for x in probes:
            worst["ratio"] = max(worst["ratio"], distance(p_cd(q(p_cd(x))), factor * q_cd(x)))

        r1, t1 = sorted((r % (unit + 1), c % (unit + 1)))
        t1 = min(t1, unit - r1)
        for z in zs:
            lhs = _pab(s, 0, r1 + t1)(z)
            rhs = _pab(s, 0, r1)(z) + s.at(r1)(_pab(s, 0, t1)(z))
            worst["additivity"] = max(worst["additivity"], distance(lhs, rhs))

        c1, d1 = sorted((a % (unit + 1), b % (unit + 1)))
        c2, d2 = sorted((c % (unit + 1), d % (unit + 1)))
        mu = overlap(c1, d1, c2, d2) / unit
        for z, w in zip(zs, ws):
            lhs = _pab(s, c1, d1)(z).inner(_pab(s, c2, d2)(w))
            worst["lebesgue"] = max(worst["lebesgue"], (lhs - z.inner(w) * mu).max_abs())

    for key, value in worst.items():
        stage.record(key, value, tol)
    return stage


@dataclass
class MultiplicityModule:
    """F = q_{0,1}E, presented by generators g_a in E with Gram projection G"""
    generators: List[Vector]
    gram: ModuleOperator
    fiber: FiberSpec
    dims: Tuple[int, ...]
    support: Tuple[int, int]
    invariance_residual: float = 0.0

    @property
    def rank(self) -> int:
        return len(self.generators)

    def combine(self, c: ModuleVector) -> Vector:
        out = self.generators[0].zero_like()
        for g, entry in zip(self.generators, c.entries):
            out = out + g.right_mul(entry)
        return out

    def coefficients(self, x: Vector) -> ModuleVector:
        return ModuleVector.from_entries(self.fiber.signature, [g.inner(x) for g in self.generators])


def extract_multiplicity(s: AbstractSemigroup, probe_window: Optional[int] = None, tol: float = 1e-8,
                         check_invariance: bool = True) -> MultiplicityModule:
    """
    range of q_{0,1} on the slot-basis probes of [0, probe_window), reduced by range_frame

    The default probe window is one unit.
    """
    unit = s.slots_per_unit
    window = unit if probe_window is None else probe_window
    q = averaging_projection(s, 0, unit)
    images = [y for y in (q(x) for x in s.probes(0, window)) if not y.is_zero()]
    bounds = [y.support_bounds() for y in images]
    if not images:
        raise DegenerateMultiplicityError("q_{0,1} annihilates every probe; the input is degenerate or not pure")
    lo, hi = min(b[0] for b in bounds), max(b[1] for b in bounds)

    flat = [s.spec.flatten(y, lo, hi) for y in images]
    frame, gram = range_frame(flat, tol)
    dims = frame_dims(frame, gram)
    if not frame or not any(dims):
        raise DegenerateMultiplicityError("range of q_{0,1} collapsed to zero")
    generators = [s.spec.unflatten(f, lo, hi) for f in frame]
    fiber = FiberSpec(s.spec.signature, len(frame), projection=gram)
    logger.info(f"multiplicity module: {len(frame)} generators, per-block dims {dims}, support [{lo}, {hi})")

    module = MultiplicityModule(generators, gram, fiber, dims, (lo, hi))
    if check_invariance:
        group = WindowGroup(s, 0, unit)
        module.invariance_residual = max(
            (distance(group.at(r)(g), g) for g in generators for r in range(1, unit)), default=0.0)
    return module


class EquivalenceMap:
    """
    M: L²([0, K), F) -> E, slot j = kN + ℓ carrying c goes to s_{kN} p_{ℓ,ℓ+1} Σ_a g_a c_a

    backward is the adjoint M†.
    """

    def __init__(self, s: AbstractSemigroup, module: MultiplicityModule, horizon: int):
        if horizon < 1:
            raise HorizonError(f"horizon must be >= 1 unit, got {horizon}")
        self.s = s
        self.module = module
        self.horizon = horizon
        self.unit = s.slots_per_unit
        self.source = GridSpec(self.unit, IndexKind.UNILATERAL, module.fiber)
        self._slot_projections = [_pab(s, ell, ell + 1) for ell in range(self.unit)]

    @property
    def span(self) -> int:
        return self.horizon * self.unit

    def forward(self, f: GridVector) -> Vector:
        bounds = f.support_bounds()
        if bounds is None:
            return self.module.generators[0].zero_like()
        if bounds[1] > self.span:
            raise HorizonError(f"vector supported up to slot {bounds[1]} beyond the horizon {self.span}")
        per_unit: Dict[int, Vector] = {}
        for j, c in f.items():
            k, ell = divmod(j, self.unit)
            y = self._slot_projections[ell](self.module.combine(c))
            per_unit[k] = per_unit[k] + y if k in per_unit else y
        out = self.module.generators[0].zero_like()
        for k in sorted(per_unit):
            out = out + self.s.at(k * self.unit)(per_unit[k])
        return out

    def backward(self, x: Vector) -> GridVector:
        slots = {}
        scale = 1.0 / self.source.h
        for k in range(self.horizon):
            y = self.s.at(k * self.unit).adjoint_apply(x)
            for ell, p in enumerate(self._slot_projections):
                c = self.module.coefficients(p(y)) * scale
                if not c.is_zero():
                    slots[k * self.unit + ell] = c
        return self.source.from_slots(slots)

    def isometry_residual(self, fs: Sequence[GridVector]) -> float:
        images = [self.forward(f) for f in fs]
        return max(((images[i].inner(images[(i + 1) % len(fs)]) - fs[i].inner(fs[(i + 1) % len(fs)])).max_abs()
                    for i in range(len(fs))), default=0.0)

    def surjectivity_residual(self, probes: Sequence[Vector]) -> float:
        """‖M M† y - y‖ for y = p_{0,K} x, which spans E_{0,K}"""
        p = _pab(self.s, 0, self.span)
        worst = 0.0
        for x in probes:
            y = p(x)
            worst = max(worst, distance(self.forward(self.backward(y)), y))
        return worst

    def exhaustion_residual(self, probes: Sequence[Vector], tol: float,
                            max_doublings: int = 12) -> Tuple[float, int]:
        """
        limit of max ‖s_T† x‖ over the probes, T doubling from K units until the value settles

        Zero exactly when the probes are exhausted by the semigroup. Returns the value and
        the last T in slots.
        """
        t = self.span
        previous = None
        for _ in range(max_doublings):
            op = self.s.at(t)
            value = max((op.adjoint_apply(x).norm() for x in probes), default=0.0)
            if value < tol or (previous is not None and abs(previous - value) < tol):
                return value, t
            previous = value
            t *= 2
        logger.warning(f"‖s_T† x‖ still moving at T = {t // 2} slots: {value:.3e}")
        return value, t // 2

    def intertwining_residual(self, t: int, fs: Sequence[GridVector]) -> float:
        """‖M† s_t M f - v_t f‖ for f supported in [0, K - t)"""
        v = standard_shift(self.source, t)
        st = self.s.at(t)
        worst = 0.0
        for f in fs:
            f = f.restrict(0, self.span - t)
            worst = max(worst, distance(self.backward(st(self.forward(f))), v(f)))
        return worst

    def unit_intertwining_residual(self, t: int, xs: Sequence[Vector]) -> float:
        """M_0† u_t = π_t M_0† on the first unit"""
        group = WindowGroup(self.s, 0, self.unit)
        pi = cyclic_shift(self.source, 0, self.unit, t)
        worst = 0.0
        for x in xs:
            lhs = self.backward(group.at(t)(x)).restrict(0, self.unit)
            rhs = pi(self.backward(x).restrict(0, self.unit))
            worst = max(worst, distance(lhs, rhs))
        return worst

    def indicator_residual(self) -> float:
        """M(1_{[0,1)} ⊗ c) = Σ_a g_a c_a for the fiber generators c"""
        worst = 0.0
        for c in self.source.fiber.generators():
            f = self.source.from_slots({ell: c for ell in range(self.unit)})
            worst = max(worst, distance(self.forward(f), self.module.combine(c)))
        return worst

    def verify(self, rng: np.random.Generator, samples: int, tol: float, surjectivity_tol: float) -> Stage:
        stage = Stage("equivalence")
        fs = [self.source.random(rng, 0, self.span) for _ in range(max(samples, 2))]
        probes = self.s.probes(0, self.span)
        stage.record("isometry", self.isometry_residual(fs), tol)
        window = self.surjectivity_residual(probes)
        exhaustion, reach = self.exhaustion_residual(probes, surjectivity_tol)
        stage.record("surjectivity_window", window, surjectivity_tol)
        stage.record("exhaustion", exhaustion, surjectivity_tol)
        # E is the closed union of the s_T E_{0,K}: onto iff both vanish
        stage.record("surjectivity", max(window, exhaustion), surjectivity_tol)
        stage.data["exhaustion_slots"] = reach
        times = [0]
        if self.span > 1:
            times = sorted({int(t) for t in rng.integers(1, self.span, size=min(max(samples, 1), 5))})
        stage.record("intertwining", max(self.intertwining_residual(t, fs[:3]) for t in times), tol)
        xs = [self.s.random(rng, 0, self.span) for _ in range(max(samples // 2, 2))]
        stage.record("unit_intertwining",
                     max(self.unit_intertwining_residual(t % self.unit, xs) for t in times), tol)
        stage.record("indicator", self.indicator_residual(), tol)
        return stage


def build_equivalence(s: AbstractSemigroup, module: MultiplicityModule, horizon: int) -> EquivalenceMap:
    return EquivalenceMap(s, module, horizon)


@dataclass
class ReconstructionConfig:
    horizon: int = 4
    tol: float = 1e-10
    surjectivity_tol: float = 1e-8
    frame_tol: float = 1e-8
    samples: int = 10
    probe_window: Optional[int] = None


@dataclass
class EquivalenceReport:
    stages: List[Stage] = field(default_factory=list)
    module: Optional[MultiplicityModule] = None
    equivalence: Optional[EquivalenceMap] = None

    @property
    def passed(self) -> bool:
        return all(st.passed for st in self.stages)

    @property
    def fiber_dims(self) -> Tuple[int, ...]:
        return self.module.dims if self.module is not None else ()

    def stage(self, name: str) -> Stage:
        for st in self.stages:
            if st.name == name:
                return st
        raise KeyError(name)


def _run_stage(report: EquivalenceReport, name: str, fn) -> Optional[Stage]:
    logger.info(f"stage {name}")
    try:
        stage = fn()
    except PureShiftException as e:
        stage = Stage(name)
        stage.fail(name, e)
    report.stages.append(stage)
    return stage


def reconstruct(s: AbstractSemigroup, config: ReconstructionConfig, rng: np.random.Generator) -> EquivalenceReport:
    if not s.declared_pure:
        logger.warning(f"{s} is not declared pure; expecting the equivalence to fail")
    unit = s.slots_per_unit
    tol = config.tol
    report = EquivalenceReport()

    probes = [s.random(rng, 0, 2 * unit) for _ in range(3)]
    pairs = [tuple(int(v) for v in rng.integers(0, 2 * unit + 1, size=2)) for _ in range(config.samples)]
    tuples = sample_tuples(rng, 2 * unit, config.samples)

    _run_stage(report, "semigroup", lambda: check_semigroup(s, probes, pairs, tol))
    _run_stage(report, "pab", lambda: verify_pab_calculus(s, tuples, probes, tol))

    def group_stage():
        group = WindowGroup(s, 0, unit)
        wrap = [(r, t) for r, t in pairs] + [(unit - 1, 1), (1, 1)]
        stage = group.verify(wrap, probes, tol)
        stage.data["continuity"] = group.continuity_residual(probes[0])
        return stage

    _run_stage(report, "window_group", group_stage)
    _run_stage(report, "averaging", lambda: verify_averaging(s, [(0, unit), (unit // 2, unit + unit // 2 + 1)],
                                                             probes, tol))

    def limit_stage():
        stage = Stage("limit")
        x = _pab(s, 0, unit)(probes[0])
        table = limit_convergence(s, x, divisors(unit), membership_tol=tol)
        stage.record("bound", max(table.bound_violation(), 0.0), tol)
        stage.record("monotone", max(table.monotone_violation(), 0.0), tol)
        stage.record("exhaustion", table.residuals[-1], tol)
        stage.data["table"] = [list(r) for r in table.rows()]
        return stage

    _run_stage(report, "limit", limit_stage)

    def q_stage():
        q = averaging_projection(s, 0, unit)
        zs = [q(x) for x in probes]
        ws = zs[1:] + zs[:1]
        return verify_q_relations(s, zs, ws, tuples, probes[:2], tol)

    _run_stage(report, "q_relations", q_stage)

    def multiplicity_stage():
        stage = Stage("multiplicity")
        report.module = extract_multiplicity(s, config.probe_window, config.frame_tol)
        stage.record("invariance", report.module.invariance_residual, tol)
        stage.data["dims"] = list(report.module.dims)
        stage.data["generators"] = report.module.rank
        return stage

    _run_stage(report, "multiplicity", multiplicity_stage)

    def equivalence_stage():
        if report.module is None:
            raise DegenerateMultiplicityError("no multiplicity module to build M from")
        report.equivalence = build_equivalence(s, report.module, config.horizon)
        return report.equivalence.verify(rng, config.samples, tol, config.surjectivity_tol)

    _run_stage(report, "equivalence", equivalence_stage)

    if report.passed:
        logger.info(f"{s} is a standard right shift with fiber dims {report.fiber_dims}")
    else:
        failed = [st.name for st in report.stages if not st.passed]
        logger.warning(f"reconstruction of {s} failed in {failed}")
    return report
