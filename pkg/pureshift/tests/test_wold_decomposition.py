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

import pytest

from exceptions import GridSpecError, StabilizationError
from grid_model import FiberSpec, distance, random_module_unitary
from wold_decomposition import (BilateralPart, ProbeClass, ShiftPart, StructuredIsometry, UnitaryPart, decompose,
                                monotonicity_violation, part_projection, pureness_metric, range_projections)

from conftest import C, C_M2


def mixed(signature, rng, window=4, rank=1):
    fiber = FiberSpec(signature, rank)
    parts = [UnitaryPart(fiber, random_module_unitary(signature, rank, rng)), ShiftPart(fiber)]
    return StructuredIsometry.disguised(parts, rng, window)


def test_power_is_isometric(signature, rng):
    s = mixed(signature, rng)
    x, y = s.spec.random(rng, 0, 6), s.spec.random(rng, 0, 6)
    for n in range(4):
        p = s.power(n)
        assert (p(x).inner(p(y)) - x.inner(y)).max_abs() < 1e-12
    assert distance(s.power(2)(x), s.power(1)(s.power(1)(x))) < 1e-12


def test_range_projections_decrease(rng):
    s = mixed(C, rng)
    probes = s.probes(0, 6)
    rs = range_projections(s, 6, probes)
    assert len(rs) == 7
    assert monotonicity_violation(rs, probes) < 1e-12


@pytest.mark.parametrize("rank", [1, 2])
def test_decompose_recovers_ranks(signature, rank, rng):
    s = mixed(signature, rng, rank=rank)
    result = decompose(s, 4)
    assert result.stage.passed, result.stage.as_dict()
    expected_unitary = tuple(rank * d for d in signature)
    expected_pure = tuple(4 * rank * d for d in signature)
    assert result.unitary_ranks == expected_unitary
    assert result.pure_ranks == expected_pure
    assert result.stabilization_step <= 4

    unitary_part = part_projection(s, 0)
    for x in s.probes(0, 4):
        assert distance(result.unitary_projection(x), unitary_part(x)) < 1e-10


def test_undisguised_shift_stabilizes_at_window(rng):
    s = StructuredIsometry([ShiftPart(FiberSpec(C, 1))])
    result = decompose(s, 3)
    assert result.stabilization_step == 3
    assert result.unitary_ranks == (0,)
    assert result.trace[-1] == 0.0


def test_bilateral_part_is_unitary(rng):
    fiber = FiberSpec(C, 1)
    s = StructuredIsometry.disguised([BilateralPart(fiber), ShiftPart(fiber)], rng, 3)
    result = decompose(s, 3)
    assert result.stage.passed
    assert result.unitary_ranks == (3,)
    assert result.pure_ranks == (3,)


def test_stabilization_error(rng):
    s = mixed(C, rng, window=4)
    with pytest.raises(StabilizationError) as err:
        decompose(s, 4, n_max=2)
    assert len(err.value.trace) == 2


def test_pureness_metric(rng):
    s = mixed(C_M2, rng)
    x = s.spec.random(rng, 0, 4)
    pure = part_projection(s, 1)(x)
    unitary = part_projection(s, 0)(x)
    rows = pureness_metric(s, [pure, unitary, pure + unitary], 6)
    assert [r.verdict for r in rows] == [ProbeClass.PURE, ProbeClass.UNITARY, ProbeClass.MIXED]
    assert rows[0].norms[-1] == pytest.approx(0.0, abs=1e-12)
    assert rows[1].norms[-1] == pytest.approx(rows[1].norms[0], rel=1e-12)


def test_bad_inputs(rng):
    with pytest.raises(GridSpecError):
        StructuredIsometry([])
    s = mixed(C, rng)
    with pytest.raises(GridSpecError):
        decompose(s, 0)
    with pytest.raises(GridSpecError):
        part_projection(s, 2)
