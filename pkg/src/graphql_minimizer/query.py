"""
Parsing & validation of client queries against a `Schema`

The supported subset is a single ``query`` operation (anonymous or named)
made of field selections, aliases, and the ``first`` argument on list
fields.  Variables, fragments, and directives are rejected.
"""

from typing import Optional, Tuple
import attr
from graphql import GraphQLSyntaxError
from graphql import parse as parse_graphql
from graphql.language import (
    FieldNode,
    FragmentDefinitionNode,
    IntValueNode,
    OperationDefinitionNode,
    OperationType,
    VariableNode,
)
from . import errors
from .schema import FieldDef, Schema, position


@attr.s(frozen=True)
class Selection:
    #: Name of the selected field in the schema
    name = attr.ib()
    #: Key the field's value is stored under in the response; the alias if
    #: one was given, else `name`
    response_key = attr.ib()
    field_def: FieldDef = attr.ib(repr=False)
    #: Name of the object type the field is selected on
    parent = attr.ib()
    #: Value of the ``first`` argument, if given
    first: Optional[int] = attr.ib(default=None)
    #: Sub-selections of an object-typed field
    selections: Tuple["Selection", ...] = attr.ib(default=(), converter=tuple)
    line = attr.ib(default=1, eq=False, repr=False)
    column = attr.ib(default=1, eq=False, repr=False)

    @property
    def qualified_name(self):
        return f"{self.parent}.{self.name}"


@attr.s(frozen=True)
class Query:
    #: Selections on the query root type
    selections: Tuple[Selection, ...] = attr.ib(converter=tuple)
    root_type = attr.ib(default="Query")
    operation_name: Optional[str] = attr.ib(default=None)


def _unsupported(node, construct):
    return errors.UnsupportedQueryError(*position(node), construct)


def parse_query(query_text: str, schema: Schema) -> Query:
    """
    Parse ``query_text`` and validate it against ``schema``.

    :raises QueryError: if the query is malformed, selects a field that does
        not exist, passes a bad argument, or uses an unsupported construct
    """
    if not query_text.strip():
        raise errors.QuerySyntaxError(1, 1, "empty query")
    try:
        document = parse_graphql(query_text)
    except GraphQLSyntaxError as e:
        line, column = (
            (e.locations[0].line, e.locations[0].column) if e.locations else (1, 1)
        )
        raise errors.QuerySyntaxError(line, column, e.message)
    operation = None
    for definition in document.definitions:
        if isinstance(definition, FragmentDefinitionNode):
            raise _unsupported(definition, "fragments")
        elif not isinstance(definition, OperationDefinitionNode):
            raise _unsupported(definition, definition.kind.replace("_", " "))
        elif operation is not None:
            raise _unsupported(definition, "multiple operations")
        operation = definition
    if operation.operation is not OperationType.QUERY:
        raise _unsupported(operation, f"{operation.operation.value} operations")
    if operation.variable_definitions:
        raise _unsupported(operation.variable_definitions[0], "variables")
    if operation.directives:
        raise _unsupported(operation.directives[0], "directives")
    return Query(
        selections=_selections(operation.selection_set, schema, schema.query_root),
        root_type=schema.query_root,
        operation_name=operation.name.value if operation.name else None,
    )


def _selections(selection_set, schema, type_name):
    selected = {}
    for node in selection_set.selections:
        if not isinstance(node, FieldNode):
            raise _unsupported(node, "fragments")
        sel = _selection(node, schema, type_name)
        if sel.response_key in selected:
            raise errors.SelectionError(
                sel.line,
                sel.column,
                f"response key {sel.response_key!r} selected twice",
            )
        selected[sel.response_key] = sel
    return list(selected.values())


def _selection(node, schema, type_name):
    line, column = position(node)
    name = node.name.value
    fdef = schema.get_field(type_name, name)
    if fdef is None:
        raise errors.UnknownFieldError(line, column, type_name, name)
    if node.directives:
        raise _unsupported(node.directives[0], "directives")
    first = None
    seen = set()
    for arg in node.arguments:
        argname = arg.name.value
        if argname in seen:
            raise errors.ArgumentError(
                *position(arg), f"argument {argname!r} given twice"
            )
        seen.add(argname)
        if argname not in fdef.arguments:
            raise errors.ArgumentError(
                *position(arg),
                f"field '{type_name}.{name}' does not take argument {argname!r}",
            )
        if isinstance(arg.value, VariableNode):
            raise _unsupported(arg.value, "variables")
        if not isinstance(arg.value, IntValueNode) or int(arg.value.value) < 0:
            raise errors.ArgumentError(
                *position(arg.value),
                f"argument {argname!r} must be a non-negative integer",
            )
        first = int(arg.value.value)
    if fdef.type_ref.is_scalar:
        if node.selection_set is not None:
            raise errors.SelectionError(
                line,
                column,
                f"field '{type_name}.{name}' of type {fdef.type_ref} cannot have"
                " a selection",
            )
        selections = ()
    else:
        if node.selection_set is None:
            raise errors.SelectionError(
                line,
                column,
                f"field '{type_name}.{name}' of type {fdef.type_ref} requires a"
                " selection",
            )
        selections = _selections(node.selection_set, schema, fdef.type_ref.name)
    return Selection(
        name=name,
        response_key=node.alias.value if node.alias else name,
        field_def=fdef,
        parent=type_name,
        first=first,
        selections=selections,
        line=line,
        column=column,
    )
