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

from math import sin, pi

import pytest

from algebra_core import ModuleVector
from cooper_engine import (ReconstructionConfig, WindowGroup, averaging_projection, build_equivalence, divisors,
                           extract_multiplicity, interval_projection, limit_convergence, reconstruct, sample_tuples,
                           verify_averaging, verify_pab_calculus, verify_q_relations, window_group)
from exceptions import (AdjointPairingError, DegenerateMultiplicityError, DivisibilityError, GridSpecError,
                        HorizonError, WindowMembershipError)
from grid_model import (FiberSpec, GridOperator, GridSpec, IndexKind, distance, sample_profile, slots_of,
                        standard_shift)
from semigroup_base import AbstractSemigroup
from semigroups import StandardShiftSemigroup, disguised_shift

from conftest import C, C_M2


class ForgetfulShift(AbstractSemigroup):
    """v_t with a wrong adjoint"""

    def at(self, t):
        v = standard_shift(self.spec, t)
        return GridOperator(v.apply, lambda x: x, slots_of(t), "broken")


def checks(stage):
    return {c.name: c for c in stage.checks}


def plain_shift(slots_per_unit=4, signature=C, rank=1):
    return StandardShiftSemigroup(GridSpec(slots_per_unit, IndexKind.UNILATERAL, FiberSpec(signature, rank)))


def test_interval_projection_is_a_restriction(rng):
    s = plain_shift()
    f = s.random(rng, 0, 8)
    assert distance(interval_projection(s, 1, 3)(f), f.restrict(1, 3)) < 1e-15
    assert distance(interval_projection(s, 2, None)(f), f.restrict(2, None)) < 1e-15
    assert interval_projection(s, 3, 1)(f).is_zero()
    assert interval_projection(s, 2, 2)(f).is_zero()


def test_interval_projection_checks_adjoints(rng):
    s = plain_shift()
    probes = [s.random(rng, 0, 8) for _ in range(3)]
    p = interval_projection(s, 1, 5, probes, 1e-12)
    assert (p.a, p.b) == (1, 5)

    broken = ForgetfulShift(s.spec, "broken")
    with pytest.raises(AdjointPairingError):
        interval_projection(broken, 1, 5, probes, 1e-12)


def test_pab_calculus(signature, rng):
    s = disguised_shift(signature, 1, 4, 2, rng)
    probes = [s.random(rng, 0, 8) for _ in range(3)]
    stage = verify_pab_calculus(s, sample_tuples(rng, 8, 8), probes, 1e-11)
    assert stage.passed, stage.as_dict()
    assert len(stage.checks) == 8


def test_window_group_exhaustive():
    s = plain_shift(10)
    group = window_group(s, 0, 10)
    probes = s.probes(0, 12)
    stage = group.verify([(r, t) for r in range(10) for t in range(10)], probes, 1e-12, strict=True)
    assert stage.passed, stage.as_dict()
    assert set(checks(stage)) == {"law[r+t<L]", "law[r+t>=L]", "unitarity", "identity"}
    assert group.branch(3, 6) == "r+t<L"
    assert group.branch(3, 7) == "r+t>=L"


def test_window_group_disguised(signature, rng):
    s = disguised_shift(signature, 1, 4, 2, rng)
    group = WindowGroup(s, 1, 5)
    probes = [s.random(rng, 0, 8) for _ in range(2)]
    stage = group.verify([(r, t) for r in range(4) for t in range(4)], probes, 1e-11)
    assert stage.passed, stage.as_dict()
    assert distance(group.at(4)(probes[0]), group.at(0)(probes[0])) < 1e-11


def test_window_group_rotates_slots(rng):
    s = plain_shift()
    f = s.random(rng, 0, 4)
    u = WindowGroup(s, 0, 4).at(1)
    assert distance(u(f), f.rotated(0, 4, 1)) < 1e-15
    with pytest.raises(GridSpecError):
        WindowGroup(s, 2, 2)


def test_averaging(signature, rng):
    s = disguised_shift(signature, 1, 4, 2, rng)
    probes = [s.random(rng, 0, 8) for _ in range(3)]
    stage = verify_averaging(s, [(0, 4), (2, 7)], probes, 1e-11)
    assert stage.passed, stage.as_dict()


def test_averaging_keeps_window_constants(rng):
    s = plain_shift()
    x = sample_profile(s.spec, lambda v: 3.0 - 1j, ModuleVector.generator(C, 1, 0), (0, 4))
    q = averaging_projection(s, 0, 4)
    assert distance(q(x), x) < 1e-14
    bump = s.spec.slot_vector(1, ModuleVector.generator(C, 1, 0))
    quarter = sample_profile(s.spec, lambda v: 0.25, ModuleVector.generator(C, 1, 0), (0, 4))
    assert distance(q(bump), quarter) < 1e-14


def test_limit_convergence_lipschitz():
    s = plain_shift(64)
    fiber = ModuleVector.generator(C, 1, 0)
    x = sample_profile(s.spec, lambda v: sin(2 * pi * v) + v, fiber, (0, 64))
    table = limit_convergence(s, x, [1, 2, 4, 8, 16])
    assert table.monotone_violation() <= 1e-12
    assert table.bound_violation() <= 1e-12
    assert all(a > b for a, b in zip(table.residuals, table.residuals[1:]))
    assert limit_convergence(s, x, [64]).residuals[0] < 1e-12


def test_limit_convergence_step_functions():
    s = plain_shift(16)
    fiber = ModuleVector.generator(C, 1, 0)
    for n in divisors(16):
        width = 16 // n
        step = sample_profile(s.spec, lambda v, w=width: 1.0 + round(v * 16) // w, fiber, (0, 16))
        assert limit_convergence(s, step, [n]).residuals[0] < 1e-12


def test_limit_convergence_errors(rng):
    s = plain_shift(8)
    x = s.random(rng, 0, 8)
    with pytest.raises(DivisibilityError):
        limit_convergence(s, x, [3])
    with pytest.raises(WindowMembershipError):
        limit_convergence(s, s.random(rng, 0, 12), [2])


def test_q_relations(signature, rng):
    s = disguised_shift(signature, 1, 4, 2, rng)
    probes = [s.random(rng, 0, 8) for _ in range(2)]
    q = averaging_projection(s, 0, 4)
    zs = [q(x) for x in probes]
    stage = verify_q_relations(s, zs, zs[::-1], sample_tuples(rng, 8, 6), probes, 1e-11)
    assert stage.passed, stage.as_dict()


@pytest.mark.parametrize("signature, rank, dims", [(C, 1, (1,)), (C_M2, 2, (2, 4))])
def test_extract_multiplicity(signature, rank, dims, rng):
    s = disguised_shift(signature, rank, 4, 2, rng)
    module = extract_multiplicity(s)
    assert module.dims == dims
    assert module.invariance_residual < 1e-11
    gram = module.gram
    assert ((gram @ gram) - gram).norm() < 1e-10


def test_extract_multiplicity_degenerate():
    s = plain_shift()
    with pytest.raises(DegenerateMultiplicityError):
        extract_multiplicity(s, probe_window=0)


def test_equivalence_map(rng):
    s = disguised_shift(C_M2, 1, 4, 2, rng)
    m = build_equivalence(s, extract_multiplicity(s), 2)
    stage = m.verify(rng, 4, 1e-10, 1e-8)
    assert stage.passed, stage.as_dict()
    f = m.source.random(rng, 0, 8)
    assert distance(m.backward(m.forward(f)), f) < 1e-10
    with pytest.raises(HorizonError):
        m.forward(m.source.random(rng, 0, 9))


@pytest.mark.parametrize("signature, rank, dims", [(C, 1, (1,)), (C_M2, 2, (2, 4))])
def test_reconstruct_disguised_shift(signature, rank, dims, rng):
    s = disguised_shift(signature, rank, 4, 2, rng)
    report = reconstruct(s, ReconstructionConfig(horizon=2, samples=4), rng)
    assert report.passed, [st.as_dict() for st in report.stages if not st.passed]
    assert report.fiber_dims == dims
    assert [st.name for st in report.stages] == ["semigroup", "pab", "window_group", "averaging", "limit",
                                                 "q_relations", "multiplicity", "equivalence"]


def test_reconstruct_rejects_nonpure(rng):
    s = disguised_shift(C, 1, 4, 2, rng, nonpure=True)
    report = reconstruct(s, ReconstructionConfig(horizon=2, samples=4), rng)
    assert not report.passed
    equivalence = checks(report.stage("equivalence"))
    assert not equivalence["exhaustion"].passed
    assert not equivalence["surjectivity"].passed
    assert equivalence["exhaustion"].residual > 1e-3
    assert report.stage("semigroup").passed


@pytest.mark.parametrize("signature, rank", [(C, 1), (C_M2, 2)])
def test_reconstruct_horizon_shorter_than_disguise(signature, rank, rng):
    s = disguised_shift(signature, rank, 4, 4, rng)
    report = reconstruct(s, ReconstructionConfig(horizon=2, samples=4), rng)
    equivalence = report.stage("equivalence")
    assert report.passed, [st.as_dict() for st in report.stages if not st.passed]
    assert checks(equivalence)["surjectivity_window"].residual < 1e-8
    assert checks(equivalence)["surjectivity"].residual < 1e-8
    assert equivalence.data["exhaustion_slots"] >= 16
