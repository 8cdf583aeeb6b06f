"""
HTTP front end: accepts GraphQL queries with bearer tokens and answers with
the response minimized for the token's role
"""

from datetime import datetime, timezone
from importlib.resources import files
import logging
from pathlib import Path
import time
from typing import Optional
import attr
from fastapi import FastAPI, Request
from fastapi.concurrency import run_in_threadpool
from fastapi.responses import JSONResponse, PlainTextResponse
import jsonschema
import uvicorn
from . import __version__, errors
from .auth import AuthConfig, bearer_token, extract_role
from .dataset import generate_dataset
from .datasource import DataSource, MemoryDataSource
from .engine import RequestSeeder, ResponseDocument, execute
from .policy import Policy, check_policy, load_policy
from .schema import Schema, parse_schema, validate_directive_placement

log = logging.getLogger(__name__)

#: Environment variable the command-line interface reads the JWT secret from
SECRET_ENVVAR = "MINIMIZER_JWT_SECRET"

#: JSON Schema for the body of a ``POST /graphql`` request
REQUEST_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["query"],
    "properties": {
        "query": {"type": "string"},
        "operationName": {"type": ["string", "null"]},
        "variables": {"type": ["object", "null"], "maxProperties": 0},
    },
}


def packaged_file(*parts: str):
    """Return a `Traversable` for a data file shipped with the package"""
    return files("graphql_minimizer").joinpath("data", *parts)


@attr.s
class ServiceConfig:
    auth: AuthConfig = attr.ib()
    #: SDL file; `None` selects the packaged period-tracking schema
    schema_path: Optional[Path] = attr.ib(default=None)
    #: Policy file; `None` selects the packaged period-tracking policy
    policy_path: Optional[Path] = attr.ib(default=None)
    host: str = attr.ib(default="127.0.0.1")
    port: int = attr.ib(default=8000)
    #: Seed for dataset generation and per-request noise
    seed: int = attr.ib(default=0)
    #: Number of users to generate when `data_dir` is not set
    dataset_users: int = attr.ib(default=100)
    #: Seed every request's noise with `seed` itself
    fixed_rng: bool = attr.ib(default=False)
    #: Directory of JSONL files to load instead of generating a dataset
    data_dir: Optional[Path] = attr.ib(default=None)


def read_source(path, default_name):
    """
    Return the text & display name of ``path``, or of the packaged data file
    ``default_name`` if ``path`` is `None`
    """
    if path is None:
        return packaged_file(default_name).read_text(encoding="utf-8"), default_name
    try:
        return Path(path).read_text(encoding="utf-8"), str(path)
    except OSError as e:
        raise errors.ConfigError(f"cannot read {path}: {e}")


def validate_sources(schema_text, schema_name, policy_text, policy_name):
    """
    Parse & cross-check a schema and a policy, returning the parsed `Schema`,
    the parsed `Policy`, and a list of ``(name, Diagnostic)`` pairs.  Errors
    that stop parsing are reported as diagnostics as well, in which case the
    corresponding parsed object is `None`.
    """
    diagnostics = []
    schema = policy = None
    try:
        schema = parse_schema(schema_text)
    except errors.SchemaError as e:
        diagnostics.append(
            (schema_name, errors.Diagnostic(e.line, e.column, e.message))
        )
    else:
        diagnostics.extend(
            (schema_name, d) for d in validate_directive_placement(schema)
        )
    try:
        policy = load_policy(policy_text)
    except errors.PolicyError as e:
        diagnostics.append((policy_name, errors.Diagnostic(e.line, 1, e.message)))
    if schema is not None and policy is not None:
        diagnostics.extend((policy_name, d) for d in check_policy(policy, schema))
    return schema, policy, diagnostics


@attr.s
class Gateway:
    """The immutable state shared by all requests"""

    schema: Schema = attr.ib()
    policy: Policy = attr.ib()
    source: DataSource = attr.ib(repr=False)
    auth: AuthConfig = attr.ib()
    seeder: RequestSeeder = attr.ib(repr=False)

    @classmethod
    def from_config(cls, config: ServiceConfig) -> "Gateway":
        """
        :raises StartupError: if the schema or policy is invalid
        :raises ConfigError: if a file cannot be read
        """
        schema_text, schema_name = read_source(config.schema_path, "tracker.graphql")
        policy_text, policy_name = read_source(
            config.policy_path, "tracker-policy.txt"
        )
        schema, policy, diagnostics = validate_sources(
            schema_text, schema_name, policy_text, policy_name
        )
        if diagnostics:
            raise errors.StartupError(diagnostics)
        if config.data_dir is not None:
            source = MemoryDataSource.load(config.data_dir, schema)
        else:
            source = generate_dataset(config.dataset_users, config.seed)
        log.info(
            "Loaded schema %s (%d types) and policy %s (%d entries, roles: %s)",
            schema_name,
            len(schema.types),
            policy_name,
            len(policy.entries),
            ", ".join(policy.roles) or "none",
        )
        return cls(
            schema=schema,
            policy=policy,
            source=source,
            auth=config.auth,
            seeder=RequestSeeder(config.seed, fixed=config.fixed_rng),
        )

    def authenticate(self, authorization: Optional[str], now=None) -> str:
        if now is None:
            now = datetime.now(timezone.utc)
        return extract_role(bearer_token(authorization), self.auth, now)

    def run_query(self, query_text: str, role: str) -> ResponseDocument:
        return execute(
            query_text,
            self.schema,
            self.source,
            self.policy,
            role,
            self.seeder.next_source(),
        )


def error_response(status_code, message, headers=None):
    return JSONResponse(
        {"errors": [{"message": message}]}, status_code=status_code, headers=headers
    )


def create_app(gateway: Gateway) -> FastAPI:
    app = FastAPI(title="graphql-minimizer", version=__version__)
    app.state.gateway = gateway

    @app.post("/graphql")
    async def graphql_endpoint(request: Request):
        start = time.perf_counter()
        try:
            body = await request.json()
        except ValueError:
            return error_response(400, "Request body is not valid JSON")
        try:
            jsonschema.validate(body, REQUEST_SCHEMA)
        except jsonschema.ValidationError as e:
            return error_response(400, f"Invalid request body: {e.message}")
        try:
            role = gateway.authenticate(request.headers.get("Authorization"))
        except errors.AuthenticationError as e:
            log.warning("Rejected request: %s", e.reason)
            return error_response(401, str(e), headers={"WWW-Authenticate": "Bearer"})
        try:
            doc = await run_in_threadpool(gateway.run_query, body["query"], role)
        except errors.QueryError as e:
            log.debug("Invalid query from role %s: %s", role, e)
            return error_response(400, str(e))
        except errors.ExecutionError as e:
            log.error("@%s failed on %s for role %s", e.directive, e.field, role)
            return error_response(500, "Internal error while minimizing the response")
        log.debug(
            "Answered query for role %s in %.3fs", role, time.perf_counter() - start
        )
        return JSONResponse({"data": doc.for_json()})

    @app.get("/healthz", response_class=PlainTextResponse)
    async def healthz():
        return "ok"

    return app


def serve(config: ServiceConfig) -> None:
    app = create_app(Gateway.from_config(config))
    log.info("Listening on %s:%d", config.host, config.port)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
