"""
Role-aware information reduction for GraphQL responses

``graphql-minimizer`` is a GraphQL gateway that transforms each field of a
response according to directives attached to the field in the schema
(``@suppress``, ``@generalize``, ``@noise``, ``@hash``) and to a policy that
sets each directive's parameters per requester role.  Roles come from
HS256-signed bearer tokens.  It can be used in Python code as::

    from graphql_minimizer import execute, load_policy, parse_schema
    from graphql_minimizer.dataset import generate_dataset
    from graphql_minimizer.reduction import RandomSource

    schema = parse_schema(sdl_text)
    policy = load_policy(policy_text)
    doc = execute(
        "{ symptoms(first: 5) { pain } }",
        schema,
        generate_dataset(10, seed=1),
        policy,
        "researcher",
        RandomSource(42),
    )
    print(doc.for_json())

or run as a web service with the ``graphql-minimizer serve`` command.
"""

from .engine import ResponseDocument, apply_pipeline, execute, resolve
from .policy import Policy, check_policy, load_policy, resolve_verdict
from .query import Query, parse_query
from .schema import (
    Schema,
    parse_schema,
    print_schema,
    validate_directive_placement,
)

__version__ = "0.1.0"
__author__ = "John Thorvald Wodder II"
__license__ = "MIT"

__all__ = [
    "Policy",
    "Query",
    "ResponseDocument",
    "Schema",
    "apply_pipeline",
    "check_policy",
    "execute",
    "load_policy",
    "parse_query",
    "parse_schema",
    "print_schema",
    "resolve",
    "resolve_verdict",
    "validate_directive_placement",
]
