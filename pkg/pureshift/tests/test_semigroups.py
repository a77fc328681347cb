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

from exceptions import GridSpecError
from grid_model import FiberSpec, GridSpec, IndexKind, SumSpec, distance
from semigroups import (BilateralShiftSemigroup, DirectSumSemigroup, DisguisedSemigroup, StandardShiftSemigroup,
                        check_semigroup, disguised_shift)

from conftest import C

PAIRS = [(0, 0), (0, 3), (1, 2), (3, 5), (4, 4), (7, 9)]


def test_standard_shift_semigroup(line, rng):
    s = StandardShiftSemigroup(line)
    stage = check_semigroup(s, [s.random(rng, 0, 8) for _ in range(3)], PAIRS, 1e-12)
    assert stage.passed, stage.as_dict()
    assert [c.name for c in stage.checks] == ["identity", "law", "isometry", "adjoint"]
    assert s.time(0.5).slots == 2


def test_disguised_shift_semigroup(signature, rng):
    s = disguised_shift(signature, 2, 4, 2, rng)
    assert isinstance(s, DisguisedSemigroup)
    assert s.declared_pure
    stage = check_semigroup(s, [s.random(rng, 0, 12) for _ in range(3)], PAIRS, 1e-11)
    assert stage.passed, stage.as_dict()


def test_disguise_changes_the_operator(rng):
    plain = disguised_shift(C, 1, 4, 0, rng)
    hidden = disguised_shift(C, 1, 4, 2, rng)
    x = plain.random(rng, 0, 4)
    assert isinstance(plain, StandardShiftSemigroup)
    assert distance(hidden.at(1)(x), plain.at(1)(x)) > 1e-3
    assert distance(hidden.at(0)(x), x) == 0.0


def test_nonpure_control(rng):
    s = disguised_shift(C, 1, 4, 2, rng, nonpure=True)
    assert not s.declared_pure
    assert isinstance(s.spec, SumSpec)
    stage = check_semigroup(s, [s.random(rng, -4, 8) for _ in range(3)], PAIRS, 1e-11)
    assert stage.passed, stage.as_dict()


def test_bilateral_is_unitary(bilateral_line, rng):
    s = BilateralShiftSemigroup(bilateral_line)
    x = s.random(rng, -4, 4)
    assert distance(s.at(5)(s.at(5).adjoint_apply(x)), x) < 1e-14
    assert not s.declared_pure


def test_wrong_grids(line, bilateral_line):
    with pytest.raises(GridSpecError):
        StandardShiftSemigroup(bilateral_line)
    with pytest.raises(GridSpecError):
        BilateralShiftSemigroup(line)
    other = GridSpec(4, IndexKind.UNILATERAL, FiberSpec(C, 2))
    with pytest.raises(GridSpecError):
        DirectSumSemigroup(SumSpec((other,)), [StandardShiftSemigroup(GridSpec(4, IndexKind.UNILATERAL,
                                                                                 FiberSpec(C, 1)))])
