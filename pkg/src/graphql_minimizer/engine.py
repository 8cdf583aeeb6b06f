"""
Query execution: resolve a parsed query against a `DataSource`, then run each
resolved field through the directives attached to it in the schema, using the
verdicts the policy gives the requester's role.

Directives run in the order they are written in the schema.  A ``suppress``
verdict (or an applied ``@suppress``) nulls the value and ends the field's
pipeline; null values pass through every other directive unchanged.  Noise is
drawn from the request's `RandomSource` depth-first over the response, in
selection order, then in list order.
"""

from datetime import datetime
import itertools
import threading
from typing import Any, Dict
import attr
from . import errors
from .datasource import DataSource
from .directives import DIRECTIVES
from .policy import Policy, resolve_verdict
from .query import Query, Selection, parse_query
from .reduction import RandomSource
from .schema import Schema
from .util import format_datetime, parse_datetime


@attr.s
class ResponseDocument:
    #: `dict` mapping response keys of the query's root selections to values
    data: Dict[str, Any] = attr.ib()
    #: The `Query` the document answers
    query: Query = attr.ib(repr=False)

    def for_json(self):
        return _jsonable(self.data)


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    elif isinstance(value, list):
        return [_jsonable(v) for v in value]
    elif isinstance(value, datetime):
        return format_datetime(value)
    else:
        return value


def resolve(query: Query, source: DataSource) -> ResponseDocument:
    """
    Fetch the raw, unminimized values selected by ``query``.  Lists come in
    the source's insertion order, truncated by ``first``.
    """
    data = {}
    for sel in query.selections:
        data[sel.response_key] = _resolve_related(
            source.get_records(sel.field_def.type_ref.name), sel, source
        )
    return ResponseDocument(data=data, query=query)


def _resolve_related(records, sel, source):
    if sel.field_def.type_ref.is_list:
        if sel.first is not None:
            records = records[: sel.first]
        return [_resolve_object(r, sel.selections, source) for r in records]
    elif records:
        return _resolve_object(records[0], sel.selections, source)
    else:
        return None


def _resolve_object(record, selections, source):
    obj = {}
    for sel in selections:
        tr = sel.field_def.type_ref
        if tr.is_scalar:
            obj[sel.response_key] = _coerce(record.get(sel.name), tr)
        else:
            linked = source.get_linked(sel.parent, sel.name, record["id"])
            obj[sel.response_key] = _resolve_related(linked, sel, source)
    return obj


def _coerce(value, type_ref):
    if value is None:
        return None
    if type_ref.is_list:
        return [_coerce(v, attr.evolve(type_ref, is_list=False)) for v in value]
    if type_ref.name == "Float" and isinstance(value, int) and not isinstance(
        value, bool
    ):
        return float(value)
    if type_ref.name == "Date" and isinstance(value, str):
        return parse_datetime(value)
    return value


def apply_pipeline(
    raw: ResponseDocument,
    schema: Schema,
    policy: Policy,
    role: str,
    rng: RandomSource,
) -> ResponseDocument:
    """
    Return a copy of ``raw`` with every field that carries directives run
    through its pipeline for ``role``.  The shape of the response is left
    alone; only values change.

    :raises ExecutionError: if a transform rejects a value, which means the
        schema & policy should not have passed validation
    """
    runner = _PipelineRunner(schema, policy, role, rng)
    data = {}
    for sel in raw.query.selections:
        data[sel.response_key] = runner.field(raw.data[sel.response_key], sel)
    return ResponseDocument(data=data, query=raw.query)


class _PipelineRunner:
    def __init__(self, schema, policy, role, rng):
        self.schema = schema
        self.policy = policy
        self.role = role
        self.rng = rng
        #: Cache of ``(directive, verdict)`` lists by qualified field name
        self.plans = {}

    def plan(self, sel: Selection):
        qualname = sel.qualified_name
        try:
            return self.plans[qualname]
        except KeyError:
            pass
        fdef = self.schema.get_field(sel.parent, sel.name)
        steps = []
        for name in fdef.attached_directives:
            verdict = resolve_verdict(self.policy, self.role, qualname, name)
            if verdict.kind == "pass":
                continue
            try:
                directive = DIRECTIVES[name]
            except KeyError:
                raise errors.ExecutionError(qualname, name, "no implementation")
            steps.append((directive, verdict))
            if verdict.kind == "suppress" or directive.terminal:
                break
        self.plans[qualname] = steps
        return steps

    def field(self, value, sel: Selection):
        for directive, verdict in self.plan(sel):
            if value is None:
                break
            if verdict.kind == "suppress":
                return None
            try:
                value = directive.transform(value, verdict.params, self.rng)
            except errors.ReductionError as e:
                raise errors.ExecutionError(sel.qualified_name, directive.name, e)
        if value is None or not sel.selections:
            return value
        elif isinstance(value, list):
            return [self.selection_set(v, sel.selections) for v in value]
        else:
            return self.selection_set(value, sel.selections)

    def selection_set(self, obj, selections):
        if obj is None:
            return None
        return {
            sel.response_key: self.field(obj[sel.response_key], sel)
            for sel in selections
        }


def execute(
    query_text: str,
    schema: Schema,
    source: DataSource,
    policy: Policy,
    role: str,
    rng: RandomSource,
) -> ResponseDocument:
    """Parse, resolve, and minimize a query for ``role``"""
    query = parse_query(query_text, schema)
    return apply_pipeline(resolve(query, source), schema, policy, role, rng)


class RequestSeeder:
    """
    Hands out one `RandomSource` per request.  Seeds are ``seed`` XOR a
    request counter, so requests get independent noise; in fixed mode every
    request is seeded with ``seed`` itself.
    """

    def __init__(self, seed: int, fixed: bool = False):
        self.seed = seed
        self.fixed = fixed
        self._counter = itertools.count(1)
        self._lock = threading.Lock()

    def next_seed(self) -> int:
        if self.fixed:
            return self.seed
        with self._lock:
            n = next(self._counter)
        return self.seed ^ n

    def next_source(self) -> RandomSource:
        return RandomSource(self.next_seed())
