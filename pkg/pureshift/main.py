#!/usr/bin/env python3
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

import sys

from loguru import logger
import click

import console
from exceptions import PureShiftException
from reports import EXIT_INPUT_ERROR, SCENARIOS, RunConfig, run


def shared_options(f):
    f = click.option("--with-timing", is_flag=True, help="add wall-clock seconds to the report")(f)
    f = click.option("--csv-dir", type=click.Path(file_okay=False), help="write curves as CSV here")(f)
    f = click.option("--report", type=click.Path(dir_okay=False), help="write the JSON report here")(f)
    f = click.option("--seed", default=7, show_default=True)(f)
    f = click.option("--tol", default=1e-10, show_default=True)(f)
    f = click.option("--horizon", default=4, show_default=True, help="units covered by M / Wold window")(f)
    f = click.option("--grid", type=int, help="slots per unit time  [default: 8, or the fixture's]")(f)
    return f


def execute(ctx, config: RunConfig):
    screen = ctx.obj["screen"]
    try:
        report = run(config)
    except PureShiftException as e:
        logger.error(f"{type(e).__name__}: {e}")
        ctx.exit(EXIT_INPUT_ERROR)

    screen.print_stages(report.stages)
    for name, rows in sorted(report.curves.items()):
        screen.print_curve(name, rows)
    if report.fiber:
        print("fiber:", report.fiber)
    screen.print_verdict(report.passed)
    ctx.exit(report.exit_code)


@click.group()
@click.option('--debug/--no-debug', default=False)
@click.pass_context
def cli(ctx, debug):
    ctx.ensure_object(dict)

    logger.remove()
    if debug:
        logger.add(sys.stderr, level="DEBUG")
    else:
        logger.add(sys.stderr, level="INFO")

    ctx.obj["screen"] = console.Screen()


@cli.command()
@shared_options
@click.option("--fixture", type=click.Path(dir_okay=False), help="shift fixture, bundled disguised shift if unset")
@click.option("--surjectivity-tol", default=1e-8, show_default=True)
@click.option("--samples", default=10, show_default=True)
@click.pass_context
def reconstruct(ctx, grid, horizon, tol, seed, report, csv_dir, with_timing, fixture, surjectivity_tol, samples):
    """rebuild a pure semigroup as the standard right shift"""
    execute(ctx, RunConfig("reconstruct", grid=grid, horizon=horizon, tol=tol, seed=seed, report=report,
                           csv_dir=csv_dir, with_timing=with_timing, fixture=fixture,
                           surjectivity_tol=surjectivity_tol, samples=samples))


@cli.command()
@shared_options
@click.option("--fixture", type=click.Path(dir_okay=False), help="wold fixture, unitary ⊕ shift if unset")
@click.pass_context
def wold(ctx, grid, horizon, tol, seed, report, csv_dir, with_timing, fixture):
    """split an isometry into its unitary and pure parts"""
    execute(ctx, RunConfig("wold", grid=grid, horizon=horizon, tol=tol, seed=seed, report=report,
                           csv_dir=csv_dir, with_timing=with_timing, fixture=fixture))


@cli.command()
@shared_options
@click.option("--algebra-tol", default=1e-12, show_default=True)
@click.option("--samples", default=25, show_default=True)
@click.pass_context
def verify(ctx, grid, horizon, tol, seed, report, csv_dir, with_timing, algebra_tol, samples):
    """check the algebraic identities on the built-in models"""
    execute(ctx, RunConfig("verify", grid=grid, horizon=horizon, tol=tol, seed=seed, report=report,
                           csv_dir=csv_dir, with_timing=with_timing, algebra_tol=algebra_tol, samples=samples))


@cli.command()
@click.argument("scenario", type=click.Choice(SCENARIOS))
@shared_options
@click.option("--algebra-tol", default=1e-12, show_default=True)
@click.option("--truncation", default=8, show_default=True, help="sample points K of the sequence examples")
@click.pass_context
def gallery(ctx, scenario, grid, horizon, tol, seed, report, csv_dir, with_timing, algebra_tol, truncation):
    """run one of the worked examples and counterexamples"""
    execute(ctx, RunConfig("gallery", grid=grid, horizon=horizon, tol=tol, seed=seed, report=report,
                           csv_dir=csv_dir, with_timing=with_timing, scenario=scenario, algebra_tol=algebra_tol,
                           truncation=truncation))


if __name__ == "__main__":
    cli(obj={})
