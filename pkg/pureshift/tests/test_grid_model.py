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

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from algebra_core import AlgebraElement, ModuleOperator, ModuleVector
from exceptions import GridAlignmentError, GridSpecError, ShapeMismatchError
from grid_model import (FiberSpec, GridSpec, GridTime, IndexKind, SumSpec, adjoint_pairing_residual,
                        bilateral_shift, combination, cyclic_shift, distance, identity, indicator,
                        multiplication_phase, operator_residual, propagation_respected, sample_profile,
                        standard_shift, window_unitary)

from conftest import C, C_M2


def test_grid_time_alignment():
    assert GridTime.from_units(0.25, 8).slots == 2
    assert GridTime.from_units(1.5, 8).whole_units(8) == 1
    assert GridTime(12).units(8) == 1.5
    with pytest.raises(GridAlignmentError):
        GridTime.from_units(0.3, 8)
    with pytest.raises(GridAlignmentError):
        GridTime(-1)


def test_slot_weight(line):
    x = line.slot_vector(2, ModuleVector.generator(line.signature, 1, 0))
    assert x.norm() == pytest.approx(0.5)
    assert x.inner(x).close_to(AlgebraElement.identity(line.signature) * 0.25, 1e-15)


def test_cell_has_weight_one():
    cell = GridSpec(1, IndexKind.CELL, FiberSpec(C_M2, 2))
    assert cell.weight == 1.0
    assert len(cell.probes(-3, 5)) == 2
    with pytest.raises(GridSpecError):
        cell.probes(0, 1)[0].shifted(1)


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1), st.integers(min_value=0, max_value=12))
def test_standard_shift_is_isometry(seed, t):
    rng = np.random.default_rng(seed)
    spec = GridSpec(4, IndexKind.UNILATERAL, FiberSpec(C_M2, 2))
    f, g = spec.random(rng, 0, 8), spec.random(rng, 0, 8)
    v = standard_shift(spec, t)

    assert (v(f).inner(v(g)) - f.inner(g)).max_abs() < 1e-12
    assert adjoint_pairing_residual(v, f, g) < 1e-12
    assert distance(v.adjoint_apply(v(f)), f) < 1e-12
    assert distance(v(v.adjoint_apply(f)), f.restrict(t, None)) < 1e-12


def test_standard_shift_rejects_other_grids(bilateral_line):
    with pytest.raises(GridSpecError):
        standard_shift(bilateral_line, 1)
    with pytest.raises(GridAlignmentError):
        standard_shift(GridSpec(4, IndexKind.UNILATERAL, FiberSpec(C, 1)), -1)


def test_bilateral_shift_is_unitary(bilateral_line, rng):
    f = bilateral_line.random(rng, -6, 6)
    u = bilateral_shift(bilateral_line, -3)
    assert distance(u(u.adjoint_apply(f)), f) < 1e-14
    assert u(f).support_bounds()[0] == f.support_bounds()[0] - 3


def test_indicator_and_empty_window(line, rng):
    f = line.random(rng, 0, 8)
    assert indicator(line, 5, 2)(f).is_zero()
    assert distance(indicator(line, 0, None)(f), f) == 0.0
    assert distance(indicator(line, 2, 5)(f) + indicator(line, 5, None)(f), indicator(line, 2, None)(f)) < 1e-15


def test_cyclic_shift_period(line, rng):
    f = line.random(rng, 0, 8)
    pi = cyclic_shift(line, 2, 6, 1)
    assert distance((pi @ pi @ pi @ pi)(f), f) < 1e-14
    assert distance(cyclic_shift(line, 2, 6, 4)(f), f) == 0.0
    assert distance(pi(f).restrict(0, 2), f.restrict(0, 2)) == 0.0
    assert propagation_respected(pi, line.probes(0, 8))
    with pytest.raises(GridSpecError):
        cyclic_shift(line, 3, 3, 1)


def test_multiplication_phase_adjoint(bilateral_line, rng):
    f, g = bilateral_line.random(rng, -4, 4), bilateral_line.random(rng, -4, 4)
    m = multiplication_phase(bilateral_line, 1.7)
    assert adjoint_pairing_residual(m, f, g) < 1e-14
    assert distance(m.adjoint_apply(m(f)), f) < 1e-14


def test_combination_conjugates_adjoint(line, rng):
    f, g = line.random(rng, 0, 6), line.random(rng, 0, 6)
    op = combination([identity(), standard_shift(line, 2)], [1j, 0.5 - 2j])
    assert adjoint_pairing_residual(op, f, g) < 1e-13
    assert op.propagation == 2


def test_flatten_preserves_inner_product(line, rng):
    f, g = line.random(rng, 1, 5), line.random(rng, 1, 5)
    ff, gf = line.flatten(f, 0, 6), line.flatten(g, 0, 6)
    assert (ff.inner(gf) - f.inner(g)).max_abs() < 1e-14
    assert distance(line.unflatten(ff, 0, 6), f) < 1e-14


def test_window_unitary(signature, rng):
    spec = GridSpec(4, IndexKind.UNILATERAL, FiberSpec(signature, 2))
    v = window_unitary(spec, rng, 0, 6)
    probes = spec.probes(0, 8)
    assert operator_residual(v @ v.adjoint(), identity(), probes) < 1e-12
    assert operator_residual(v.adjoint() @ v, identity(), probes) < 1e-12
    assert propagation_respected(v, probes)
    far = spec.slot_vector(7, ModuleVector.generator(signature, 2, 1))
    assert distance(v(far), far) == 0.0


def test_fiber_projection(rng):
    one, zero = AlgebraElement.identity(C_M2), AlgebraElement.zero(C_M2)
    p = ModuleOperator.from_entries(C_M2, [[one, zero], [zero, zero]])
    fiber = FiberSpec(C_M2, 2, p)
    assert len(fiber.generators()) == 1
    spec = GridSpec(2, IndexKind.UNILATERAL, fiber)
    x = spec.random(rng, 0, 3)
    assert distance(x.map_fiber(p), x) < 1e-14
    with pytest.raises(GridSpecError):
        FiberSpec(C, 2, p)


def test_sample_profile(line):
    fiber = ModuleVector.generator(line.signature, 1, 0)
    x = sample_profile(line, lambda v: 2.0, fiber, (0, 4))
    assert x.support_bounds() == (0, 4)
    assert x.norm() == pytest.approx(2.0)
    with pytest.raises(GridSpecError):
        sample_profile(line, lambda v: 1.0, fiber, (3, 3))
    with pytest.raises(ShapeMismatchError):
        sample_profile(line, lambda v: 1.0, ModuleVector.generator(line.signature, 2, 0), (0, 4))


def test_sum_spec(rng):
    a = GridSpec(4, IndexKind.UNILATERAL, FiberSpec(C, 1))
    b = GridSpec(4, IndexKind.BILATERAL, FiberSpec(C, 2))
    cell = GridSpec(1, IndexKind.CELL, FiberSpec(C, 1))
    spec = SumSpec((a, b, cell))
    assert spec.slots_per_unit == 4
    x, y = spec.random(rng, -2, 3), spec.random(rng, -2, 3)
    assert x.norm() == pytest.approx(1.0)
    assert (spec.flatten(x, -2, 3).inner(spec.flatten(y, -2, 3)) - x.inner(y)).max_abs() < 1e-14
    assert distance(spec.unflatten(spec.flatten(x, -2, 3), -2, 3), x) < 1e-14
    assert len(spec.probes(-2, 3)) == 3 + 10 + 1

    with pytest.raises(GridSpecError):
        SumSpec((a, GridSpec(4, IndexKind.UNILATERAL, FiberSpec(C_M2, 1))))
    with pytest.raises(GridSpecError):
        SumSpec((a, GridSpec(8, IndexKind.BILATERAL, FiberSpec(C, 1))))
