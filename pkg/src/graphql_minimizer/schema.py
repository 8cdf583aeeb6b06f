"""
Parsing & validation of the supported GraphQL SDL subset: object types with
scalar or object fields, non-null and list wrappers, a ``first: Int``
argument on list fields, and argument-less field directives declared
``on FIELD_DEFINITION``.  Directive parameters live in the policy file, never
in the schema.
"""

from typing import List, Optional
import attr
from graphql import GraphQLSyntaxError
from graphql import parse as parse_graphql
from graphql.language import (
    DirectiveDefinitionNode,
    ListTypeNode,
    NonNullTypeNode,
    ObjectTypeDefinitionNode,
    OperationType,
    ScalarTypeDefinitionNode,
    SchemaDefinitionNode,
)
from . import errors
from .directives import DIRECTIVES

#: Scalar types every schema can use.  ``Date`` is not part of GraphQL but is
#: always available; declaring ``scalar Date`` is allowed and changes nothing.
SCALAR_TYPES = frozenset({"Int", "Float", "String", "ID", "Boolean", "Date"})


@attr.s(frozen=True)
class TypeRef:
    name = attr.ib()
    is_list = attr.ib(default=False)
    non_null = attr.ib(default=False)
    #: Whether the items of a list type are non-null
    item_non_null = attr.ib(default=False)

    @property
    def is_scalar(self):
        return self.name in SCALAR_TYPES

    def __str__(self):
        s = self.name
        if self.is_list:
            s = "[" + s + ("!" if self.item_non_null else "") + "]"
        return s + ("!" if self.non_null else "")


@attr.s(frozen=True)
class FieldDef:
    name = attr.ib()
    type_ref = attr.ib()
    #: Directive names in the order they are written in the source
    attached_directives = attr.ib(default=(), converter=tuple)
    #: Names of declared arguments; only ``"first"`` is supported
    arguments = attr.ib(default=(), converter=tuple)
    line = attr.ib(default=1, eq=False, repr=False)
    column = attr.ib(default=1, eq=False, repr=False)
    #: ``(line, column)`` of each entry in `attached_directives`
    directive_positions = attr.ib(default=(), converter=tuple, eq=False, repr=False)

    def for_json(self):
        return {
            "type": str(self.type_ref),
            "arguments": list(self.arguments),
            "directives": list(self.attached_directives),
        }


@attr.s(frozen=True)
class ObjectType:
    name = attr.ib()
    #: `dict` mapping field names to `FieldDef`\s in source order
    fields = attr.ib()
    line = attr.ib(default=1, eq=False, repr=False)
    column = attr.ib(default=1, eq=False, repr=False)

    def for_json(self):
        return {name: f.for_json() for name, f in self.fields.items()}


@attr.s(frozen=True)
class Schema:
    #: `dict` mapping type names to `ObjectType`\s in source order
    types = attr.ib()
    #: Names of all declared directives
    directives = attr.ib(converter=frozenset)
    query_root = attr.ib(default="Query")

    @property
    def query_type(self):
        return self.types[self.query_root]

    def get_field(self, type_name, field_name) -> Optional[FieldDef]:
        try:
            return self.types[type_name].fields.get(field_name)
        except KeyError:
            return None

    def for_json(self):
        return {
            "query_root": self.query_root,
            "directives": sorted(self.directives),
            "types": {name: t.for_json() for name, t in self.types.items()},
        }


def position(node):
    if node.loc is None:
        return (1, 1)
    return (node.loc.start_token.line, node.loc.start_token.column)


def unsupported(node, construct):
    return errors.UnsupportedConstructError(*position(node), construct)


def parse_schema(sdl_text: str) -> Schema:
    """
    Parse SDL text into a `Schema`.

    :raises SchemaError: if the text is empty, malformed, uses a construct
        outside the supported subset, or refers to undefined types or
        undeclared directives
    """
    if not sdl_text.strip():
        raise errors.EmptySchemaError()
    try:
        document = parse_graphql(sdl_text)
    except GraphQLSyntaxError as e:
        line, column = (
            (e.locations[0].line, e.locations[0].column) if e.locations else (1, 1)
        )
        raise errors.SchemaSyntaxError(line, column, e.message)

    declared = {}
    type_nodes = {}
    query_root = None
    for definition in document.definitions:
        if isinstance(definition, DirectiveDefinitionNode):
            name = definition.name.value
            if name in declared:
                raise errors.DuplicateDefinitionError(
                    *position(definition), "directive", name
                )
            if definition.arguments:
                raise unsupported(definition, "directive arguments")
            if definition.repeatable:
                raise unsupported(definition, "repeatable directives")
            locations = [loc.value for loc in definition.locations]
            if locations != ["FIELD_DEFINITION"]:
                raise unsupported(
                    definition, f"directive locations {' | '.join(locations)}"
                )
            declared[name] = position(definition)
        elif isinstance(definition, ScalarTypeDefinitionNode):
            if definition.name.value != "Date":
                raise unsupported(definition, f"custom scalar {definition.name.value}")
            if definition.directives:
                raise unsupported(definition, "directives on types")
        elif isinstance(definition, SchemaDefinitionNode):
            if query_root is not None:
                raise errors.DuplicateDefinitionError(
                    *position(definition), "schema definition", "schema"
                )
            if definition.directives:
                raise unsupported(definition, "directives on the schema")
            query_root = ""
            for op in definition.operation_types:
                if op.operation is not OperationType.QUERY:
                    raise unsupported(op, f"{op.operation.value} root")
                query_root = op.type.name.value
        elif isinstance(definition, ObjectTypeDefinitionNode):
            name = definition.name.value
            if name in type_nodes or name in SCALAR_TYPES:
                raise errors.DuplicateDefinitionError(
                    *position(definition), "type", name
                )
            if definition.interfaces:
                raise unsupported(definition, "interfaces")
            if definition.directives:
                raise unsupported(definition, "directives on types")
            type_nodes[name] = definition
        else:
            raise unsupported(definition, definition.kind.replace("_", " "))

    types = {}
    for name, node in type_nodes.items():
        fields = {}
        for fnode in node.fields:
            fdef = _field_def(fnode, type_nodes, declared)
            if fdef.name in fields:
                raise errors.DuplicateDefinitionError(
                    *position(fnode), "field", f"{name}.{fdef.name}"
                )
            fields[fdef.name] = fdef
        types[name] = ObjectType(name, fields, *position(node))

    if not query_root:
        query_root = "Query"
    if query_root not in types:
        raise errors.MissingQueryRootError(query_root)
    for fdef in types[query_root].fields.values():
        if fdef.type_ref.is_scalar:
            raise errors.UnsupportedConstructError(
                fdef.line, fdef.column, "scalar fields on the query root"
            )
    return Schema(types=types, directives=declared, query_root=query_root)


def _field_def(fnode, type_nodes, declared):
    type_ref = _type_ref(fnode.type)
    if not type_ref.is_scalar and type_ref.name not in type_nodes:
        named = fnode.type
        while not hasattr(named, "name"):
            named = named.type
        raise errors.UnknownTypeError(*position(named), type_ref.name)
    arguments = []
    for arg in fnode.arguments:
        argtype = arg.type
        if (
            arg.name.value != "first"
            or isinstance(argtype, (ListTypeNode, NonNullTypeNode))
            or argtype.name.value != "Int"
            or arg.default_value is not None
            or arg.directives
        ):
            raise unsupported(arg, f"field argument {arg.name.value!r}")
        if not type_ref.is_list:
            raise unsupported(arg, "argument 'first' on a non-list field")
        arguments.append("first")
    names = []
    positions = []
    for d in fnode.directives:
        name = d.name.value
        if d.arguments:
            raise unsupported(d, "directive arguments")
        if name not in declared:
            raise errors.UndeclaredDirectiveError(*position(d), name)
        if name in names:
            raise errors.DuplicateDefinitionError(
                *position(d), "directive attachment", f"@{name}"
            )
        names.append(name)
        positions.append(position(d))
    return FieldDef(
        name=fnode.name.value,
        type_ref=type_ref,
        attached_directives=names,
        arguments=arguments,
        line=position(fnode)[0],
        column=position(fnode)[1],
        directive_positions=positions,
    )


def _type_ref(node):
    non_null = is_list = item_non_null = False
    if isinstance(node, NonNullTypeNode):
        non_null = True
        node = node.type
    if isinstance(node, ListTypeNode):
        is_list = True
        node = node.type
        if isinstance(node, NonNullTypeNode):
            item_non_null = True
            node = node.type
        if isinstance(node, ListTypeNode):
            raise unsupported(node, "nested list types")
    return TypeRef(
        name=node.name.value,
        is_list=is_list,
        non_null=non_null,
        item_non_null=item_non_null,
    )


def validate_directive_placement(schema: Schema) -> List[errors.Diagnostic]:
    """
    Check every directive attachment in ``schema`` against the field's type.
    Returns a list of `Diagnostic`\\s, empty if every attachment is valid.
    """
    diagnostics = []
    for tname, otype in schema.types.items():
        for fname, fdef in otype.fields.items():
            tr = fdef.type_ref
            for name, (line, column) in zip(
                fdef.attached_directives, fdef.directive_positions
            ):
                directive = DIRECTIVES.get(name)
                if directive is None:
                    diagnostics.append(
                        errors.Diagnostic(
                            line, column, f"no reduction implements directive @{name}"
                        )
                    )
                    continue
                if directive.nullable_only and tr.non_null:
                    diagnostics.append(
                        errors.Diagnostic(
                            line,
                            column,
                            f"@{name} cannot be attached to non-null field"
                            f" {tname}.{fname} ({tr})",
                        )
                    )
                if directive.targets is not None and (
                    tr.is_list or not directive.accepts_type(tr.name)
                ):
                    diagnostics.append(
                        errors.Diagnostic(
                            line,
                            column,
                            f"@{name} cannot be applied to {tname}.{fname} of type"
                            f" {tr}; it supports"
                            f" {', '.join(sorted(directive.targets))}",
                        )
                    )
    return diagnostics


def print_schema(schema: Schema) -> str:
    """Render ``schema`` as canonical SDL text"""
    blocks = []
    if schema.directives:
        blocks.append(
            "\n".join(
                f"directive @{name} on FIELD_DEFINITION"
                for name in sorted(schema.directives)
            )
        )
    blocks.append("scalar Date")
    if schema.query_root != "Query":
        blocks.append(f"schema {{\n  query: {schema.query_root}\n}}")
    for otype in schema.types.values():
        lines = [f"type {otype.name} {{"]
        for fdef in otype.fields.values():
            s = "  " + fdef.name
            if fdef.arguments:
                s += "(" + ", ".join(f"{a}: Int" for a in fdef.arguments) + ")"
            s += f": {fdef.type_ref}"
            for d in fdef.attached_directives:
                s += f" @{d}"
            lines.append(s)
        lines.append("}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"
