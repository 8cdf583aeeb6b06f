"""
Load harness measuring the latency & throughput cost of the reduction
directives

Each variant serves the same symptom query from a schema that attaches one
directive (or none, for the baseline) to one field; comparing the variants at
increasing object counts shows what each transform adds per request.
"""

import asyncio
from contextlib import contextmanager
import csv
from importlib.resources import as_file
import io
import logging
import os
import socket
import statistics
import subprocess
import sys
import time
from typing import List, Optional
import attr
import httpx
from . import errors
from .auth import AuthConfig, issue_token
from .dataset import users_for_symptoms
from .service import SECRET_ENVVAR, packaged_file

log = logging.getLogger(__name__)

VARIANTS = ("baseline", "noop", "generalize", "noise", "hash")

OBJECT_COUNTS = (100, 1000, 10000)

#: Role the packaged benchmark policies grant their directive to
BENCH_ROLE = "bench"

DEFAULT_WARMUP = 50

MIN_MEASURED_REQUESTS = 30

#: Client concurrency for latency runs
LATENCY_CONCURRENCY = 1

#: Client concurrency for throughput runs
THROUGHPUT_CONCURRENCY = 8

#: Variants whose mean latency is expected to increase in this order
EXPECTED_ORDER = ("generalize", "noise", "hash")

CSV_COLUMNS = [
    "variant",
    "object_count",
    "mean_latency_s",
    "stddev_s",
    "throughput_rps",
    "samples",
]


def bench_query(object_count: int) -> str:
    return f"{{ symptoms(first: {object_count}) {{ id pain mood recordedAt }} }}"


def _config_check(pred, message):
    def validator(_inst, attribute, value):
        if not pred(value):
            raise errors.BenchConfigError(f"{attribute.name} {message}, got {value!r}")

    return validator


def _positive_int(x):
    return isinstance(x, int) and not isinstance(x, bool) and x > 0


@attr.s(frozen=True)
class BenchConfig:
    #: Base URL of the service under test
    target: str = attr.ib()
    variant: str = attr.ib(
        validator=_config_check(lambda v: v in VARIANTS, f"must be one of {VARIANTS}")
    )
    object_count: int = attr.ib(
        validator=_config_check(_positive_int, "must be a positive integer")
    )
    #: Bearer token sent with every request, if any
    token: Optional[str] = attr.ib(default=None, repr=False)
    warmup_requests: int = attr.ib(
        default=DEFAULT_WARMUP,
        validator=_config_check(
            lambda n: isinstance(n, int) and n >= 0, "must be a non-negative integer"
        ),
    )
    measured_requests: int = attr.ib(
        default=200,
        validator=_config_check(
            lambda n: isinstance(n, int) and n >= MIN_MEASURED_REQUESTS,
            f"must be at least {MIN_MEASURED_REQUESTS}",
        ),
    )
    concurrency: int = attr.ib(
        default=LATENCY_CONCURRENCY,
        validator=_config_check(_positive_int, "must be a positive integer"),
    )
    #: Per-request timeout in seconds
    timeout: float = attr.ib(default=60.0)


@attr.s(frozen=True)
class BenchCell:
    """Measurements for one variant at one object count"""

    variant: str = attr.ib()
    object_count: int = attr.ib()
    #: Wall-clock time of each measured request, in seconds
    latencies = attr.ib(converter=tuple, repr=False)
    #: Wall-clock time of the whole measured phase, in seconds
    elapsed: float = attr.ib()
    concurrency: int = attr.ib(default=LATENCY_CONCURRENCY)

    @property
    def samples(self) -> int:
        return len(self.latencies)

    @property
    def mean_latency(self) -> float:
        return statistics.mean(self.latencies)

    @property
    def stddev(self) -> float:
        return statistics.stdev(self.latencies) if len(self.latencies) > 1 else 0.0

    @property
    def max_latency(self) -> float:
        return max(self.latencies)

    @property
    def throughput(self) -> float:
        return self.samples / self.elapsed

    def for_json(self):
        return {
            "variant": self.variant,
            "object_count": self.object_count,
            "mean_latency_s": self.mean_latency,
            "stddev_s": self.stddev,
            "max_latency_s": self.max_latency,
            "throughput_rps": self.throughput,
            "samples": self.samples,
            "concurrency": self.concurrency,
        }


@attr.s
class BenchReport:
    cells: List[BenchCell] = attr.ib(factory=list)

    def get(self, variant, object_count) -> Optional[BenchCell]:
        for cell in self.cells:
            if cell.variant == variant and cell.object_count == object_count:
                return cell
        return None

    def extend(self, other: "BenchReport") -> None:
        self.cells.extend(other.cells)

    def for_json(self):
        return [c.for_json() for c in self.cells]


def run_bench(config: BenchConfig, transport=None) -> BenchReport:
    """
    Check the target's health, send ``config.warmup_requests`` unmeasured
    requests, then time ``config.measured_requests`` requests issued by
    ``config.concurrency`` concurrent workers.

    ``transport`` is passed to `httpx.AsyncClient`, e.g., to drive an ASGI
    app in-process.

    :raises TargetUnreachableError: if the health check fails
    :raises BenchRequestError: if any request gets a non-200 response
    """
    return asyncio.run(_run_bench(config, transport))


async def _run_bench(config, transport):
    payload = {"query": bench_query(config.object_count)}
    headers = {}
    if config.token is not None:
        headers["Authorization"] = f"Bearer {config.token}"
    async with httpx.AsyncClient(
        base_url=config.target, transport=transport, timeout=config.timeout
    ) as client:
        await _check_health(client, config.target)

        async def request():
            start = time.perf_counter()
            r = await client.post("/graphql", json=payload, headers=headers)
            latency = time.perf_counter() - start
            if r.status_code != 200:
                raise errors.BenchRequestError(r.status_code, r.text[:200])
            got = len(r.json()["data"]["symptoms"])
            if got != config.object_count:
                raise errors.BenchConfigError(
                    f"target returned {got} symptoms instead of {config.object_count}"
                )
            return latency

        await _drive(request, config.warmup_requests, config.concurrency)
        latencies, elapsed = await _drive(
            request, config.measured_requests, config.concurrency
        )
    cell = BenchCell(
        variant=config.variant,
        object_count=config.object_count,
        latencies=latencies,
        elapsed=elapsed,
        concurrency=config.concurrency,
    )
    log.info(
        "%s @ %d objects: mean %.4fs, %.1f req/s over %d requests",
        cell.variant,
        cell.object_count,
        cell.mean_latency,
        cell.throughput,
        cell.samples,
    )
    return BenchReport([cell])


async def _check_health(client, target):
    try:
        r = await client.get("/healthz")
    except httpx.HTTPError as e:
        raise errors.TargetUnreachableError(target, e)
    if r.status_code != 200:
        raise errors.TargetUnreachableError(target, f"HTTP {r.status_code}")


async def _drive(request, total, concurrency):
    latencies = []
    pending = iter(range(total))

    async def worker():
        for _ in pending:
            latencies.append(await request())

    start = time.perf_counter()
    await asyncio.gather(*(worker() for _ in range(min(concurrency, total))))
    return latencies, time.perf_counter() - start


def emit_report(report: BenchReport, fmt: str = "table") -> str:
    """Render ``report`` as an aligned text table or as CSV"""
    rows = [
        [
            c.variant,
            str(c.object_count),
            format(c.mean_latency, ".6g"),
            format(c.stddev, ".6g"),
            format(c.throughput, ".6g"),
            str(c.samples),
        ]
        for c in report.cells
    ]
    if fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        writer.writerows(rows)
        return out.getvalue()
    elif fmt == "table":
        table = [CSV_COLUMNS] + rows
        widths = [max(len(r[i]) for r in table) for i in range(len(CSV_COLUMNS))]
        lines = []
        for r in table:
            cols = [r[0].ljust(widths[0])]
            cols.extend(v.rjust(w) for v, w in zip(r[1:], widths[1:]))
            lines.append("  ".join(cols).rstrip())
        return "\n".join(lines) + "\n"
    else:
        raise ValueError(f"unknown report format {fmt!r}")


def baseline_growth(report: BenchReport, low=1000, high=10000) -> Optional[float]:
    """
    Return the ratio of the baseline's mean latency at ``high`` objects to
    that at ``low`` objects, or `None` if either was not measured
    """
    lo = report.get("baseline", low)
    hi = report.get("baseline", high)
    if lo is None or hi is None:
        return None
    return hi.mean_latency / lo.mean_latency


def ordering_violations(report: BenchReport, slack: float = 0.05) -> List[str]:
    """
    Describe each object count at which a variant in `EXPECTED_ORDER` is more
    than ``slack`` slower than the variant after it
    """
    problems = []
    counts = sorted({c.object_count for c in report.cells})
    for count in counts:
        for cheaper, dearer in zip(EXPECTED_ORDER, EXPECTED_ORDER[1:]):
            a = report.get(cheaper, count)
            b = report.get(dearer, count)
            if a is not None and b is not None:
                if a.mean_latency > b.mean_latency * (1 + slack):
                    problems.append(
                        f"at {count} objects, {cheaper} ({a.mean_latency:.4g}s) is"
                        f" slower than {dearer} ({b.mean_latency:.4g}s)"
                    )
    return problems


def free_port(host: str) -> int:
    with socket.socket() as s:
        s.bind((host, 0))
        return s.getsockname()[1]


def wait_healthy(url: str, timeout: float = 60.0) -> None:
    """Poll ``url``'s health check until it answers 200"""
    deadline = time.monotonic() + timeout
    while True:
        try:
            status = httpx.get(f"{url}/healthz", timeout=5).status_code
        except httpx.HTTPError as e:
            problem = e
        else:
            if status == 200:
                return
            problem = f"HTTP {status}"
        if time.monotonic() > deadline:
            raise errors.TargetUnreachableError(url, problem)
        time.sleep(0.25)


@contextmanager
def spawn_service(variant, secret, n_users, seed=0, host="127.0.0.1"):
    """
    Run the service for ``variant`` in a subprocess with a fixed noise seed,
    yielding its base URL once it is healthy
    """
    schema_file = packaged_file("bench", f"{variant}.graphql")
    policy_file = packaged_file("bench", f"{variant}-policy.txt")
    with as_file(schema_file) as schema_path, as_file(policy_file) as policy_path:
        port = free_port(host)
        url = f"http://{host}:{port}"
        cmd = [
            sys.executable,
            "-m",
            "graphql_minimizer",
            "--log-level",
            "WARNING",
            "serve",
            "--schema",
            str(schema_path),
            "--policy",
            str(policy_path),
            "--listen",
            f"{host}:{port}",
            "--seed",
            str(seed),
            "--dataset-users",
            str(n_users),
            "--fixed-rng",
        ]
        log.info("Starting %s service on %s", variant, url)
        proc = subprocess.Popen(cmd, env={**os.environ, SECRET_ENVVAR: secret})
        try:
            wait_healthy(url)
            yield url
        finally:
            proc.terminate()
            try:
                proc.wait(timeout=10)
            except subprocess.TimeoutExpired:
                proc.kill()
                proc.wait()


def run_suite(
    variants=VARIANTS,
    object_counts=OBJECT_COUNTS,
    measured_requests: int = 200,
    warmup_requests: int = DEFAULT_WARMUP,
    concurrency: int = LATENCY_CONCURRENCY,
    seed: int = 0,
    host: str = "127.0.0.1",
) -> BenchReport:
    """
    Benchmark every variant at every object count, serving each variant from
    its own service process
    """
    secret = os.urandom(32).hex()
    token = issue_token(BENCH_ROLE, AuthConfig(secret), expires_in=86400)
    n_users = users_for_symptoms(max(object_counts))
    report = BenchReport()
    for variant in variants:
        with spawn_service(variant, secret, n_users, seed=seed, host=host) as url:
            for count in object_counts:
                config = BenchConfig(
                    target=url,
                    variant=variant,
                    object_count=count,
                    token=token,
                    warmup_requests=warmup_requests,
                    measured_requests=measured_requests,
                    concurrency=concurrency,
                )
                report.extend(run_bench(config))
    growth = baseline_growth(report)
    if growth is not None:
        log.info("Baseline latency grows %.2f-fold from 1000 to 10000 objects", growth)
    for problem in ordering_violations(report):
        log.warning("Unexpected latency ordering: %s", problem)
    return report
