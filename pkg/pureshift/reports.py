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

import csv
import json
import time
from dataclasses import asdict, dataclass, field
from math import pi, sqrt
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from algebra_core import AlgebraSignature, ModuleVector
from codec import FixtureCodec, ShiftFixture, WoldFixture
from cooper_engine import (ReconstructionConfig, WindowGroup, averaging_projection, divisors, limit_convergence,
                           reconstruct, sample_tuples, verify_averaging, verify_pab_calculus, verify_q_relations)
from exceptions import CheckFailure, FixtureParsingError, GridSpecError
from gallery import (continuity_curve, dilation_check, interleave, interleave_is_shift, nonadex_curve,
                     nonadex_wold, nondecex_check, nondecex_pointwise, nonsc_check, weyl_check)
from grid_model import FiberSpec, distance, random_module_unitary, sample_profile
from helpers import make_rng, to_pairs
from residuals import Stage
from semigroups import disguised_shift
from wold_decomposition import (ProbeClass, ShiftPart, StructuredIsometry, UnitaryPart, decompose, part_projection,
                                pureness_metric)

SCHEMA = 1
COMMANDS = ("reconstruct", "wold", "verify", "gallery")
SCENARIOS = ("interleave", "interleave_shift", "nondecex", "nonsc", "nonadex", "weyl", "dilation")
FIXTURES = Path(__file__).parent / "fixtures"

DEFAULT_GRID = 8

EXIT_PASS = 0
EXIT_CHECK_FAILURE = 1
EXIT_INPUT_ERROR = 2

Curve = List[Tuple[float, float, Optional[float]]]


@dataclass
class RunConfig:
    command: str
    grid: Optional[int] = None
    horizon: int = 4
    tol: float = 1e-10
    algebra_tol: float = 1e-12
    surjectivity_tol: float = 1e-8
    seed: int = 7
    scenario: Optional[str] = None
    fixture: Optional[str] = None
    report: Optional[str] = None
    csv_dir: Optional[str] = None
    disguise_units: int = 4
    samples: int = 10
    truncation: int = 8
    with_timing: bool = False

    def validate(self):
        if self.command not in COMMANDS:
            raise GridSpecError(f"unknown command {self.command!r}")
        if (self.grid is not None and self.grid < 1) or self.horizon < 1:
            raise GridSpecError(f"grid and horizon must be >= 1, got {self.grid}, {self.horizon}")
        if self.tol <= 0 or self.algebra_tol <= 0 or self.surjectivity_tol <= 0:
            raise GridSpecError("tolerances must be positive")
        if self.command == "gallery" and self.scenario not in SCENARIOS:
            raise GridSpecError(f"unknown scenario {self.scenario!r}, expected one of {SCENARIOS}")

    @property
    def slots(self) -> int:
        """slots per unit; fixtures bring their own when --grid is not given"""
        return DEFAULT_GRID if self.grid is None else self.grid

    def echo(self) -> Dict[str, Any]:
        out = asdict(self)
        out.pop("with_timing")
        return out


@dataclass
class Report:
    config: RunConfig
    stages: List[Stage] = field(default_factory=list)
    fiber: Dict[str, Any] = field(default_factory=dict)
    curves: Dict[str, Curve] = field(default_factory=dict)
    timing: Optional[float] = None

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.stages)

    @property
    def exit_code(self) -> int:
        return EXIT_PASS if self.passed else EXIT_CHECK_FAILURE

    def as_dict(self) -> Dict[str, Any]:
        out = {"schema": SCHEMA, "config": self.config.echo(), "stages": [s.as_dict() for s in self.stages],
               "fiber": self.fiber, "passed": self.passed}
        if self.config.with_timing and self.timing is not None:
            out["timing"] = {"seconds": self.timing}
        return out

    def to_json(self) -> str:
        return json.dumps(_plain(self.as_dict()), sort_keys=True, indent=2)


def _plain(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (complex, np.complexfloating)):
        return to_pairs(np.asarray(value))
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def load_fixture(path: str):
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise FixtureParsingError(f"{path}: cannot read fixture ({e.strerror})")
    if not text.strip():
        raise FixtureParsingError(f"{path}: empty fixture")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise FixtureParsingError(f"{path}:{e.lineno}:{e.colno}: {e.msg}")
    return FixtureCodec.decode(data, "$")


def write_report(report: Report, path: str):
    Path(path).write_text(report.to_json() + "\n", encoding="utf-8")
    logger.info(f"report written to {path}")


def write_curves(curves: Dict[str, Curve], directory: str):
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for name, rows in sorted(curves.items()):
        with open(out / f"{name}.csv", "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(["x", "value", "bound"])
            for x, value, bound in rows:
                writer.writerow([repr(float(x)), repr(float(value)), "" if bound is None else repr(float(bound))])
    logger.info(f"{len(curves)} curves written to {directory}")


def run_reconstruct(config: RunConfig, rng: np.random.Generator, report: Report):
    fixture = load_fixture(config.fixture or str(FIXTURES / "disguised_shift.json"))
    if not isinstance(fixture, ShiftFixture):
        raise FixtureParsingError(f"{config.fixture}: reconstruct needs a 'shift' fixture")
    s = fixture.build(rng, config.grid)
    result = reconstruct(s, ReconstructionConfig(horizon=config.horizon, tol=config.tol,
                                                 surjectivity_tol=config.surjectivity_tol, samples=config.samples),
                         rng)
    report.stages.extend(result.stages)
    report.fiber = {"dims": list(result.fiber_dims), "slots_per_unit": s.slots_per_unit,
                    "generators": result.module.rank if result.module is not None else 0}
    limit = next((st for st in result.stages if st.name == "limit"), None)
    if limit is not None and "table" in limit.data:
        report.curves["limit"] = [(n, r, w) for n, r, w in limit.data["table"]]


def _default_wold(rng: np.random.Generator, window: int) -> StructuredIsometry:
    sig = AlgebraSignature((1,))
    fiber = FiberSpec(sig, 1)
    parts = [UnitaryPart(fiber, random_module_unitary(sig, 1, rng)), ShiftPart(fiber)]
    return StructuredIsometry.disguised(parts, rng, window)


def run_wold(config: RunConfig, rng: np.random.Generator, report: Report):
    window = config.horizon
    if config.fixture:
        fixture = load_fixture(config.fixture)
        if not isinstance(fixture, WoldFixture):
            raise FixtureParsingError(f"{config.fixture}: wold needs a 'wold' fixture")
        s = fixture.build(rng)
    else:
        s = _default_wold(rng, window)

    result = decompose(s, window, tol=config.tol)
    report.stages.append(result.stage)
    report.curves["stabilization"] = [(n + 1, r, None) for n, r in enumerate(result.trace)]

    stage = Stage("classification")
    probes = s.probes(0, window)
    unitary_parts = [k for k, p in enumerate(s.parts) if not isinstance(p, ShiftPart)]
    shift_parts = [k for k, p in enumerate(s.parts) if isinstance(p, ShiftPart)]
    x = s.spec.random(rng, 0, window)
    expected = []
    pure_x = _sum_parts(s, shift_parts, x)
    unitary_x = _sum_parts(s, unitary_parts, x)
    if shift_parts:
        expected.append((pure_x, ProbeClass.PURE))
    if unitary_parts:
        expected.append((unitary_x, ProbeClass.UNITARY))
    if shift_parts and unitary_parts:
        expected.append((pure_x + unitary_x, ProbeClass.MIXED))
    n_max = result.stabilization_step + max(window, s.disguise_window) + 1
    rows = pureness_metric(s, [v for v, _ in expected], n_max, config.tol)
    wrong = sum(1 for row, (_, want) in zip(rows, expected) if row.verdict != want)
    stage.record("misclassified", wrong, 0.0)
    stage.data["verdicts"] = [row.verdict.value for row in rows]
    recovery = max((distance(result.unitary_projection(p), _sum_parts(s, unitary_parts, p)) for p in probes),
                   default=0.0)
    stage.record("recovery", recovery, config.tol)
    report.stages.append(stage)
    report.fiber = {"unitary_ranks": list(result.unitary_ranks), "pure_ranks": list(result.pure_ranks),
                    "stabilization_step": result.stabilization_step}


def _sum_parts(s: StructuredIsometry, indices: Sequence[int], x):
    out = x.zero_like()
    for k in indices:
        out = out + part_projection(s, k)(x)
    return out


def run_verify(config: RunConfig, rng: np.random.Generator, report: Report):
    unit = config.slots
    tol = config.algebra_tol
    signatures = [AlgebraSignature((1,)), AlgebraSignature((1, 2))]
    for sig in signatures:
        for units in (0, config.disguise_units):
            s = disguised_shift(sig, 1, unit, units, rng)
            label = f"{sig}{' disguised' if units else ''}"
            probes = [s.random(rng, 0, 2 * unit) for _ in range(3)]
            pab = verify_pab_calculus(s, sample_tuples(rng, 2 * unit, config.samples), probes, tol)
            pab.name = f"pab {label}"
            report.stages.append(pab)

            group = WindowGroup(s, 0, unit)
            law = group.verify([(r, t) for r in range(unit) for t in range(unit)], probes[:1], tol)
            law.name = f"window_group {label}"
            report.stages.append(law)

            avg = verify_averaging(s, [(0, unit), (1, unit + 2)], probes, tol)
            q = averaging_projection(s, 0, unit)
            zs = [q(x) for x in probes]
            avg.extend(verify_q_relations(s, zs, zs[1:] + zs[:1], sample_tuples(rng, unit, config.samples),
                                          probes[:1], tol), "q")
            avg.name = f"averaging {label}"
            report.stages.append(avg)

    stage = Stage("limit")
    s = disguised_shift(signatures[0], 1, unit, 0, rng)
    fiber = ModuleVector.generator(signatures[0], 1, 0)
    x = sample_profile(s.spec, lambda v: np.sin(2 * pi * v), fiber, (0, unit))
    table = limit_convergence(s, x, divisors(unit), membership_tol=tol)
    stage.record("bound", max(table.bound_violation(), 0.0), tol)
    stage.record("monotone", max(table.monotone_violation(), 0.0), tol)
    for n in divisors(unit):
        width = unit // n
        step = sample_profile(s.spec, lambda v, w=width: 1.0 + (int(round(v * unit)) // w), fiber, (0, unit))
        stage.record(f"step[{n}]", limit_convergence(s, step, [n]).residuals[0], tol)
    report.curves["limit"] = [(n, r, w) for n, r, w in table.rows()]
    report.stages.append(stage)

    base = StructuredIsometry([ShiftPart(FiberSpec(signatures[0], 1))])
    inter = interleave(base, unit)
    report.stages.append(inter.verify_law([(r, t) for r in range(unit) for t in range(unit)],
                                          inter.spec.probes(0, 2), tol))


def run_gallery(config: RunConfig, rng: np.random.Generator, report: Report):
    name = config.scenario
    tol = config.algebra_tol
    unit = config.slots
    stage = Stage(name)

    if name == "interleave":
        sig = AlgebraSignature((1,))
        fiber = FiberSpec(sig, 1)
        base = StructuredIsometry([UnitaryPart(fiber, random_module_unitary(sig, 1, rng)), ShiftPart(fiber)])
        inter = interleave(base, unit)
        stage = inter.verify_law([(r, t) for r in range(unit) for t in range(unit)], inter.spec.probes(0, 2), tol)
        stage.name = name
    elif name == "interleave_shift":
        fiber = FiberSpec(AlgebraSignature((1,)), 1)
        stage.record("residual", interleave_is_shift(fiber, unit, config.horizon), tol)
    elif name == "nondecex":
        k = config.truncation
        off = max(abs(nondecex_check(k, n, m) - 1.0) for n in range(k + 1) for m in range(k + 1) if n != m)
        diag = max(nondecex_check(k, n, n) for n in range(k + 1))
        stage.record("off_diagonal", off, tol)
        stage.record("diagonal", diag, tol)
        stage.record("pointwise", nondecex_pointwise(k, k), tol)
        report.curves[name] = [(n, nondecex_pointwise(k, n), nondecex_check(k, n, n + 1)) for n in range(k + 1)]
    elif name == "nonsc":
        k = config.truncation
        slots = max(unit, k * (k + 1))
        if slots != unit:
            logger.info(f"grid raised to N = {slots} to resolve the thin indicators")
        jump = nonsc_check(k, slots, slots // k)
        stage.record("jump", max(sqrt(2) - jump, 0.0), 0.05)
        rows = continuity_curve(k, slots)
        finer = continuity_curve(k, 2 * slots)
        # one-slot shift of a Lipschitz profile is O(h): halving h should about halve it
        stage.record("smooth_refinement", finer[-1][1] / rows[-1][1], 0.75)
        stage.data["smooth"] = [rows[-1][1], finer[-1][1]]
        stage.data["jump"] = jump
        report.curves[name] = [(t, a, b) for t, a, b in rows]
    elif name == "nonadex":
        ms = [1, 4, 8, 16, 32]
        curve = nonadex_curve(ms)
        stage.record("fraction", max(abs(p.fraction - 1.0 / p.samples) for p in curve), tol)
        stage.record("complement_norm", max(abs(p.complement_norm - 1.0) for p in curve), tol)
        window = config.horizon
        wold = nonadex_wold(4, window, config.tol)
        expected = [0] + [window] * 3
        stage.record("ideal_wold", sum(abs(a - b) for a, b in zip(wold.unitary_ranks, expected)), 0.0)
        report.curves[name] = [(p.samples, p.fraction, p.complement_norm) for p in curve]
    elif name == "weyl":
        result = weyl_check(unit, config.horizon * unit, 3, 2 * pi, rng)
        stage.record("phase", result.deviation, tol)
        stage.record("spread", result.spread, tol)
        stage.data.update({"sign": result.sign, "expected": result.expected, "phase": result.phase})
        report.curves[name] = [(k, abs(p - result.expected), None) for k, p in enumerate(result.phases)]
    elif name == "dilation":
        stage = dilation_check(unit, config.horizon, rng, tol)
        report.curves[name] = [(t, v, None) for t, v in stage.data["curve"]]
    report.stages.append(stage)


RUNNERS = {"reconstruct": run_reconstruct, "wold": run_wold, "verify": run_verify, "gallery": run_gallery}


def run(config: RunConfig) -> Report:
    """
    dispatch one command; input errors propagate as PureShiftException, failed checks
    (raised or recorded) only show in the report
    """
    config.validate()
    rng = make_rng(config.seed)
    report = Report(config)
    started = time.perf_counter()
    logger.info(f"running {config.command}{' ' + config.scenario if config.scenario else ''} with seed {config.seed}")
    try:
        RUNNERS[config.command](config, rng, report)
    except CheckFailure as e:
        logger.error(f"{config.command} aborted: {e}")
        stage = Stage(config.command)
        stage.fail(type(e).__name__, e)
        trace = getattr(e, "trace", None)
        if trace:
            stage.data["trace"] = [float(v) if np.isfinite(v) else None for v in trace]
        report.stages.append(stage)
    report.timing = time.perf_counter() - started

    if config.report:
        write_report(report, config.report)
    if config.csv_dir and report.curves:
        write_curves(report.curves, config.csv_dir)
    return report
