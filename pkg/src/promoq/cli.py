"""Command-line interface.

Subcommands cover the three workflows: ``analyze`` for one level's
steady-state table, ``pipeline`` for a whole ladder (optionally validated by
simulation), and ``policy`` for the authority database.  Reports go to
standard output, diagnostics to standard error.  Exit codes are fixed:
0 success (or allowed), 1 denied, 2 validation or usage failure, 3 I/O
failure.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import __version__
from .configfile import load_pipeline_config
from .errors import NotFoundError, PolicyError, ValidationError
from .pipeline import PipelineModel, PipelineReport, analyze_pipeline
from .policy import (
    AuthorityDatabase,
    AuthorizationRequest,
    PolicyDocument,
    apply_event_log,
    apply_promotion,
    evaluate,
    load_database,
    save_database,
    serialize_policy,
)
from .queueing import (
    BirthDeathSpec,
    expected_in_system,
    geometric_normalization_constant,
    mm1k_distribution,
    performance_metrics,
)
from .simulate import SimulationConfig, read_event_log, simulate_pipeline

_EXIT_DENIED = 1
_EXIT_IO = 3


def _translate_errors(fn):
    """Map library failures onto the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ValidationError, PolicyError, NotFoundError) as exc:
            raise click.UsageError(str(exc)) from exc
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(_EXIT_IO)

    return wrapper


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(version=__version__)
def main():
    """Promotion-queue analytics and the authority-policy database."""


def render_fixed_report(arrival_rate: float, service_rate: float, capacity: int) -> str:
    """Render the classic fixed-point table for one constant-rate level."""
    dist = mm1k_distribution(arrival_rate, service_rate, capacity)
    mean_in_system = expected_in_system(dist)
    constant = geometric_normalization_constant(arrival_rate, service_rate, capacity)
    lines = [
        f"Ratio of arrival to departure is --> {arrival_rate / service_rate:.6f}",
        f"Normalization constant is--> {float(constant):.6f}",
    ]
    lines.extend(f"P{i} is--> {p:.6f}" for i, p in enumerate(dist))
    lines.append(f"Ls is--> {mean_in_system:.6f}")
    return "\n".join(lines) + "\n"


@main.command()
@click.option("--lambda", "arrival_rate", type=float, required=True,
              help="Arrival rate per unit time.")
@click.option("--mu", "service_rate", type=float, required=True,
              help="Service (promotion) rate per unit time.")
@click.option("--capacity", type=int, required=True, help="Maximum customers in the system.")
@click.option("--format", "output_format", type=click.Choice(["paper", "json"]),
              default="paper", show_default=True, help="Report layout.")
@click.option("--plot-dir", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Also render the occupancy distribution as a PNG into this directory.")
@_translate_errors
def analyze(arrival_rate, service_rate, capacity, output_format, plot_dir):
    """Steady-state table for a single constant-rate level."""
    dist = mm1k_distribution(arrival_rate, service_rate, capacity)
    if output_format == "paper":
        click.echo(render_fixed_report(arrival_rate, service_rate, capacity), nl=False)
    else:
        spec = BirthDeathSpec.constant(arrival_rate, service_rate, capacity)
        metrics = performance_metrics(spec, dist)
        payload = {
            "rho": metrics.traffic_intensity,
            "distribution": list(dist.probabilities),
            "L": metrics.expected_in_system,
            "W": metrics.mean_time_in_system,
            "lambda_eff": metrics.effective_arrival_rate,
            "blocking_probability": metrics.blocking_probability,
        }
        click.echo(json.dumps(payload, indent=2))
    if plot_dir is not None:
        from .plots import save_occupancy_figure

        plot_dir.mkdir(parents=True, exist_ok=True)
        written = save_occupancy_figure(
            plot_dir / "occupancy.png",
            dist.probabilities,
            title=f"lambda={arrival_rate:g}, mu={service_rate:g}, K={capacity}",
        )
        click.echo(f"wrote {written}", err=True)


def _load_config(path: Path) -> PipelineModel:
    try:
        return load_pipeline_config(path)
    except FileNotFoundError:
        raise click.UsageError(f"config file not found: {path}") from None


def _pipeline_rows(report: PipelineReport, results) -> tuple[list[str], list[list[str]]]:
    header = ["level", "label", "lambda", "L", "Lq", "W", "Wq", "lambda_eff", "blocking"]
    if results is not None:
        header += ["sim_L", "diff_L", "max_diff_p"]
    rows = []
    for index, level in enumerate(report):
        m = level.metrics
        row = [
            str(level.level_id),
            level.label,
            f"{level.arrival_rate:.6f}",
            f"{m.expected_in_system:.6f}",
            f"{m.expected_in_queue:.6f}",
            f"{m.mean_time_in_system:.6f}" if m.mean_time_in_system is not None else "-",
            f"{m.mean_time_in_queue:.6f}" if m.mean_time_in_queue is not None else "-",
            f"{m.effective_arrival_rate:.6f}",
            f"{m.blocking_probability:.6f}",
        ]
        if results is not None:
            sim = results[index]
            diff_p = max(
                abs(a - b)
                for a, b in zip(level.distribution.probabilities, sim.empirical_distribution)
            )
            row += [
                f"{sim.empirical_L:.6f}",
                f"{abs(sim.empirical_L - m.expected_in_system):.6f}",
                f"{diff_p:.6f}",
            ]
        rows.append(row)
    return header, rows


@main.command("pipeline")
@click.option("--config", "config_path", type=click.Path(path_type=Path), required=True,
              help="Pipeline configuration file.")
@click.option("--simulate", "run_simulation", is_flag=True,
              help="Also run the discrete-event simulator and compare.")
@click.option("--seed", type=int, default=0, show_default=True, help="Simulation seed.")
@click.option("--arrivals", type=int, default=100_000, show_default=True,
              help="Measured external arrivals for --simulate.")
@click.option("--warmup", type=int, default=None,
              help="Warmup arrivals discarded before measurement [default: 10% of --arrivals].")
@click.option("--plot-dir", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Render per-level occupancy figures and a summary PNG into this directory.")
@_translate_errors
def pipeline_command(config_path, run_simulation, seed, arrivals, warmup, plot_dir):
    """Analyze a multi-level pipeline from a configuration file."""
    model = _load_config(config_path)
    report = analyze_pipeline(model)
    results = None
    if run_simulation:
        config = SimulationConfig(seed=seed, measured_arrivals=arrivals, warmup_arrivals=warmup)
        results, _ = simulate_pipeline(model, config)
    header, rows = _pipeline_rows(report, results)
    click.echo("\t".join(header))
    for row in rows:
        click.echo("\t".join(row))
    if plot_dir is not None:
        from .plots import save_occupancy_figure, save_pipeline_summary_figure

        plot_dir.mkdir(parents=True, exist_ok=True)
        for index, level in enumerate(report):
            written = save_occupancy_figure(
                plot_dir / f"level{level.level_id}_occupancy.png",
                level.distribution.probabilities,
                title=f"{level.label} occupancy",
                empirical=results[index].empirical_distribution if results else None,
            )
            click.echo(f"wrote {written}", err=True)
        written = save_pipeline_summary_figure(
            plot_dir / "pipeline_summary.png", report, results
        )
        click.echo(f"wrote {written}", err=True)


_db_option = click.option(
    "--db", "db_dir", type=click.Path(file_okay=False, path_type=Path), required=True,
    envvar="PROMOQ_DB",
    help="Authority database directory (or set PROMOQ_DB).",
)


@main.group()
def policy():
    """Manage and query the authority-policy database."""


@policy.command("add")
@_db_option
@click.option("--name", required=True)
@click.option("--id", "employee_id", type=int, required=True)
@click.option("--designation", required=True)
@click.option("--signing-limit", type=int, required=True)
@_translate_errors
def policy_add(db_dir, name, employee_id, designation, signing_limit):
    """Create a policy record and write its file."""
    doc = PolicyDocument(
        name=name, id=employee_id, designation=designation, signing_limit=signing_limit
    )
    db_dir.mkdir(parents=True, exist_ok=True)
    target = db_dir / f"{employee_id}.xml"
    if target.exists():
        raise click.UsageError(f"record {employee_id} already exists; use 'policy promote'")
    target.write_text(serialize_policy(doc), encoding="utf-8")
    click.echo(f"added {employee_id}")


@policy.command("get")
@_db_option
@click.argument("employee_id", type=int)
@_translate_errors
def policy_get(db_dir, employee_id):
    """Print one employee's policy document."""
    db = load_database(db_dir)
    doc = db.records.get(employee_id)
    if doc is None:
        raise click.UsageError(f"no record with id {employee_id}")
    click.echo(serialize_policy(doc), nl=False)


@policy.command("check")
@_db_option
@click.option("--name", required=True)
@click.option("--id", "employee_id", type=int, required=True)
@click.option("--designation", required=True)
@click.option("--amount", type=int, required=True)
@_translate_errors
def policy_check(db_dir, name, employee_id, designation, amount):
    """Decide an authorization request; exits 0 if allowed, 1 if denied."""
    db = load_database(db_dir)
    request = AuthorizationRequest(
        name=name, id=employee_id, designation=designation, amount=amount
    )
    decision = evaluate(db, request)
    if decision.allowed:
        click.echo("ALLOWED")
    else:
        click.echo(f"DENIED: {decision.reason}")
        sys.exit(_EXIT_DENIED)


@policy.command("promote")
@_db_option
@click.option("--id", "employee_id", type=int, required=True)
@click.option("--designation", required=True)
@click.option("--signing-limit", type=int, required=True)
@_translate_errors
def policy_promote(db_dir, employee_id, designation, signing_limit):
    """Apply a promotion to an existing record."""
    db = load_database(db_dir)
    updated = apply_promotion(db, employee_id, designation, signing_limit)
    target = db_dir / f"{employee_id}.xml"
    target.write_text(serialize_policy(updated.records[employee_id]), encoding="utf-8")
    click.echo(f"promoted {employee_id} to {designation} (limit {signing_limit})")


@policy.command("replay")
@_db_option
@click.option("--events", "events_path", type=click.Path(path_type=Path), required=True,
              help="Event log produced by the simulator.")
@click.option("--config", "config_path", type=click.Path(path_type=Path), required=True,
              help="Pipeline configuration the events refer to.")
@_translate_errors
def policy_replay(db_dir, events_path, config_path):
    """Replay a simulator event log into the database."""
    model = _load_config(config_path)
    events = read_event_log(events_path)
    db = load_database(db_dir) if db_dir.exists() else AuthorityDatabase.empty()
    updated = apply_event_log(db, events, model)
    save_database(updated, db_dir)
    click.echo(f"replayed {len(events)} events; {len(updated)} records in database")


if __name__ == "__main__":
    main()
