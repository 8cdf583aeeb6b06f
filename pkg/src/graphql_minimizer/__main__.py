import logging
from pathlib import Path
import click
from . import __version__, errors
from .auth import AuthConfig, issue_token
from .bench import (
    DEFAULT_WARMUP,
    LATENCY_CONCURRENCY,
    MIN_MEASURED_REQUESTS,
    OBJECT_COUNTS,
    THROUGHPUT_CONCURRENCY,
    VARIANTS,
    BenchConfig,
    baseline_growth,
    emit_report,
    ordering_violations,
    run_bench,
    run_suite,
)
from .dataset import generate_dataset
from .service import (
    SECRET_ENVVAR,
    ServiceConfig,
    read_source,
    serve as serve_app,
    validate_sources,
)

LOG_LEVELS = ["CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG"]

existing_file = click.Path(exists=True, dir_okay=False, path_type=Path)


def parse_listen(_ctx, _param, value):
    host, sep, port = value.rpartition(":")
    if not sep or not host:
        raise click.BadParameter("must be of the form HOST:PORT")
    try:
        portno = int(port)
    except ValueError:
        portno = -1
    if not (0 < portno < 65536):
        raise click.BadParameter(f"invalid port {port!r}")
    return host, portno


def secret_option(f):
    return click.option(
        "--jwt-secret",
        envvar=SECRET_ENVVAR,
        show_envvar=True,
        required=True,
        help="HMAC secret for HS256 tokens (at least 32 bytes)",
    )(f)


def role_claim_option(f):
    return click.option(
        "--role-claim",
        default="role",
        show_default=True,
        help="Name of the JWT claim holding the role",
    )(f)


@click.group()
@click.version_option(__version__, "-V", "--version", message="%(prog)s %(version)s")
@click.option(
    "-l",
    "--log-level",
    type=click.Choice(LOG_LEVELS, case_sensitive=False),
    default="INFO",
    show_default=True,
    help="Set logging level",
)
def main(log_level):
    """Role-aware information reduction for GraphQL responses"""
    logging.basicConfig(
        format="%(asctime)s [%(levelname)-8s] %(name)s: %(message)s",
        datefmt="%H:%M:%S",
        level=getattr(logging, log_level.upper()),
    )


@main.command()
@click.option("--schema", type=existing_file, help="SDL file to serve")
@click.option("--policy", type=existing_file, help="Policy file to enforce")
@click.option(
    "--listen",
    default="127.0.0.1:8000",
    show_default=True,
    callback=parse_listen,
    help="Address to listen on, as HOST:PORT",
)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option(
    "--dataset-users",
    type=click.IntRange(min=1),
    default=100,
    show_default=True,
    help="Number of users to generate",
)
@click.option(
    "--data-dir",
    type=click.Path(exists=True, file_okay=False, path_type=Path),
    help="Load records written by `gen` instead of generating them",
)
@click.option(
    "--fixed-rng",
    is_flag=True,
    help="Seed every request's noise with --seed itself",
)
@click.option("--anonymous-role", help="Role for requests without a token")
@secret_option
@role_claim_option
def serve(
    schema,
    policy,
    listen,
    seed,
    dataset_users,
    data_dir,
    fixed_rng,
    anonymous_role,
    jwt_secret,
    role_claim,
):
    """Run the GraphQL gateway"""
    host, port = listen
    try:
        config = ServiceConfig(
            auth=AuthConfig(
                jwt_secret, role_claim=role_claim, anonymous_role=anonymous_role
            ),
            schema_path=schema,
            policy_path=policy,
            host=host,
            port=port,
            seed=seed,
            dataset_users=dataset_users,
            fixed_rng=fixed_rng,
            data_dir=data_dir,
        )
        serve_app(config)
    except errors.StartupError as e:
        for path, d in e.diagnostics:
            click.echo(f"{path}:{d}", err=True)
        raise click.ClickException("startup validation failed")
    except (errors.ConfigError, errors.DataIntegrityError) as e:
        raise click.ClickException(str(e))


@main.command()
@click.option("--schema", type=existing_file, help="SDL file to check")
@click.option("--policy", type=existing_file, help="Policy file to check")
@click.pass_context
def check(ctx, schema, policy):
    """Validate a schema and a policy against each other"""
    try:
        schema_text, schema_name = read_source(schema, "tracker.graphql")
        policy_text, policy_name = read_source(policy, "tracker-policy.txt")
    except errors.ConfigError as e:
        raise click.ClickException(str(e))
    _, _, diagnostics = validate_sources(
        schema_text, schema_name, policy_text, policy_name
    )
    for path, d in diagnostics:
        click.echo(f"{path}:{d}")
    ctx.exit(1 if diagnostics else 0)


@main.command()
@click.option("--role", required=True, help="Role to grant")
@click.option(
    "--expires-in",
    type=click.IntRange(min=1),
    default=3600,
    show_default=True,
    help="Token lifetime in seconds",
)
@secret_option
@role_claim_option
def token(role, expires_in, jwt_secret, role_claim):
    """Mint a bearer token for a role"""
    try:
        auth = AuthConfig(jwt_secret, role_claim=role_claim)
        click.echo(issue_token(role, auth, expires_in=expires_in))
    except errors.ConfigError as e:
        raise click.ClickException(str(e))


@main.command()
@click.option("--users", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option(
    "--out",
    type=click.Path(file_okay=False, path_type=Path),
    required=True,
    help="Directory to write the JSONL files to",
)
def gen(users, seed, out):
    """Generate a period-tracking dataset"""
    source = generate_dataset(users, seed)
    source.dump(out)
    for type_name, n in source.counts().items():
        click.echo(f"{type_name}: {n}")


def report_format_option(f):
    return click.option(
        "--format",
        "fmt",
        type=click.Choice(["table", "csv"]),
        default="table",
        show_default=True,
    )(f)


@main.command()
@click.option("--target", required=True, help="Base URL of the gateway")
@click.option("--variant", type=click.Choice(VARIANTS), required=True)
@click.option(
    "--objects", type=click.IntRange(min=1), default=1000, show_default=True
)
@click.option(
    "--requests",
    type=click.IntRange(min=MIN_MEASURED_REQUESTS),
    default=200,
    show_default=True,
    help="Number of measured requests",
)
@click.option(
    "--concurrency",
    type=click.IntRange(min=1),
    default=LATENCY_CONCURRENCY,
    show_default=True,
)
@click.option(
    "--warmup", type=click.IntRange(min=0), default=DEFAULT_WARMUP, show_default=True
)
@report_format_option
@click.option("--token-file", type=existing_file, help="File holding a bearer token")
def bench(target, variant, objects, requests, concurrency, warmup, fmt, token_file):
    """Measure one variant at one object count against a running gateway"""
    bearer = token_file.read_text(encoding="utf-8").strip() if token_file else None
    try:
        report = run_bench(
            BenchConfig(
                target=target,
                variant=variant,
                object_count=objects,
                token=bearer,
                warmup_requests=warmup,
                measured_requests=requests,
                concurrency=concurrency,
            )
        )
    except errors.BenchError as e:
        raise click.ClickException(str(e))
    click.echo(emit_report(report, fmt), nl=False)


@main.command("bench-suite")
@click.option(
    "--variant",
    "variants",
    type=click.Choice(VARIANTS),
    multiple=True,
    help="Variant to run  [default: all]",
)
@click.option(
    "--objects",
    "object_counts",
    type=click.IntRange(min=1),
    multiple=True,
    help=f"Object count to run  [default: {', '.join(map(str, OBJECT_COUNTS))}]",
)
@click.option(
    "--requests",
    type=click.IntRange(min=MIN_MEASURED_REQUESTS),
    default=200,
    show_default=True,
)
@click.option(
    "--warmup", type=click.IntRange(min=0), default=DEFAULT_WARMUP, show_default=True
)
@click.option(
    "--throughput",
    is_flag=True,
    help=f"Use {THROUGHPUT_CONCURRENCY} concurrent clients instead of one",
)
@click.option("--seed", type=int, default=0, show_default=True)
@report_format_option
def bench_suite(variants, object_counts, requests, warmup, throughput, seed, fmt):
    """Start a gateway per variant and measure every object count"""
    try:
        report = run_suite(
            variants=variants or VARIANTS,
            object_counts=object_counts or OBJECT_COUNTS,
            measured_requests=requests,
            warmup_requests=warmup,
            concurrency=THROUGHPUT_CONCURRENCY if throughput else LATENCY_CONCURRENCY,
            seed=seed,
        )
    except errors.BenchError as e:
        raise click.ClickException(str(e))
    click.echo(emit_report(report, fmt), nl=False)
    growth = baseline_growth(report)
    if growth is not None:
        click.echo(f"Baseline growth 1000 -> 10000 objects: {growth:.2f}x", err=True)
    for problem in ordering_violations(report):
        click.echo(f"Warning: {problem}", err=True)


if __name__ == "__main__":
    main()
