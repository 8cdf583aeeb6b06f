import attr


class MinimizerError(Exception):
    """Superclass for all errors raised by this package"""

    pass


@attr.s(frozen=True)
class Diagnostic:
    """
    A non-fatal finding about a schema or policy, tied to a source position.
    Diagnostics are returned, not raised; the command-line tools print them
    with a ``file:`` prefix.
    """

    #: 1-based line number
    line = attr.ib()
    #: 1-based column number
    column = attr.ib()
    message = attr.ib()

    def __str__(self):
        return f"{self.line}:{self.column}: {self.message}"


class ReductionError(MinimizerError):
    """Superclass for errors raised by the information reduction transforms"""

    pass


class ParameterError(ReductionError):
    """Raised when a transform is given invalid parameters"""

    def __init__(self, message):
        #: Description of the invalid parameter
        self.message = message

    def __str__(self):
        return f"Invalid reduction parameters: {self.message}"


class ValueRangeError(ReductionError):
    """Raised when a noised date leaves the representable range"""

    def __init__(self, value, offset):
        #: The original date
        self.value = value
        #: The offset that was to be added, in seconds
        self.offset = offset

    def __str__(self):
        return (
            f"Adding {self.offset} seconds to {self.value.isoformat()} leaves the"
            " supported date range"
        )


class ValueTypeError(ReductionError):
    """Raised when a transform receives a value of a variant it cannot handle"""

    def __init__(self, operation, kind):
        #: The name of the transform
        self.operation = operation
        #: The scalar kind of the rejected value
        self.kind = kind

    def __str__(self):
        return f"{self.operation} cannot be applied to a {self.kind} value"


class SchemaError(MinimizerError):
    """
    Superclass for errors raised while parsing a schema.  Every instance
    carries the position of the offending construct.
    """

    def __init__(self, line, column, message):
        #: 1-based line number
        self.line = line
        #: 1-based column number
        self.column = column
        self.message = message

    def __str__(self):
        return f"{self.line}:{self.column}: {self.message}"


class EmptySchemaError(SchemaError):
    """Raised when the schema source contains no definitions"""

    def __init__(self):
        super().__init__(1, 1, "empty schema")


class SchemaSyntaxError(SchemaError):
    """Raised when the schema source cannot be tokenized or parsed"""

    pass


class DuplicateDefinitionError(SchemaError):
    """Raised when a type, field, or directive is defined twice"""

    def __init__(self, line, column, kind, name):
        self.kind = kind
        self.name = name
        super().__init__(line, column, f"duplicate {kind} {name!r}")


class UndeclaredDirectiveError(SchemaError):
    """Raised when a field uses a directive that the schema never declares"""

    def __init__(self, line, column, name):
        self.name = name
        super().__init__(line, column, f"undeclared directive @{name}")


class UnknownTypeError(SchemaError):
    """Raised when a field refers to a type that is not defined"""

    def __init__(self, line, column, name):
        self.name = name
        super().__init__(line, column, f"unknown type {name!r}")


class UnsupportedConstructError(SchemaError):
    """Raised for GraphQL constructs outside of the supported SDL subset"""

    def __init__(self, line, column, construct):
        self.construct = construct
        super().__init__(line, column, f"unsupported: {construct}")


class MissingQueryRootError(SchemaError):
    """Raised when the schema has no query root type"""

    def __init__(self, name):
        self.name = name
        super().__init__(1, 1, f"query root type {name!r} is not defined")


class PolicyError(MinimizerError):
    """Superclass for errors raised while loading a policy file"""

    def __init__(self, line, message):
        #: 1-based line number of the offending header or stanza
        self.line = line
        self.message = message

    def __str__(self):
        return f"line {self.line}: {self.message}"


class PolicySyntaxError(PolicyError):
    """Raised when a policy stanza is malformed"""

    pass


class UnknownDirectiveError(PolicyError):
    """Raised when a policy entry names a directive with no implementation"""

    def __init__(self, line, name):
        self.name = name
        super().__init__(line, f"unknown directive {name!r}")


class InvalidParameterError(PolicyError):
    """Raised when a policy entry's parameters are invalid for its directive"""

    def __init__(self, line, entry, message):
        #: ``(role, field, directive)`` of the offending entry
        self.entry = entry
        super().__init__(
            line,
            f"invalid parameters for role {entry[0]!r}, field {entry[1]!r},"
            f" directive {entry[2]!r}: {message}",
        )


class DuplicateEntryError(PolicyError):
    """Raised when two policy entries share a role, field, and directive"""

    def __init__(self, line, entry):
        self.entry = entry
        super().__init__(
            line,
            f"duplicate entry for role {entry[0]!r}, field {entry[1]!r},"
            f" directive {entry[2]!r}",
        )


class AuthenticationError(MinimizerError):
    """Raised when a requester's role cannot be established"""

    def __init__(self, reason):
        #: Short description of why authentication failed
        self.reason = reason

    def __str__(self):
        return f"Authentication failed: {self.reason}"


class QueryError(MinimizerError):
    """Superclass for errors raised while parsing & validating a query"""

    def __init__(self, line, column, message):
        self.line = line
        self.column = column
        self.message = message

    def __str__(self):
        return f"{self.line}:{self.column}: {self.message}"


class QuerySyntaxError(QueryError):
    """Raised when a query cannot be parsed"""

    pass


class UnknownFieldError(QueryError):
    """Raised when a query selects a field its type does not define"""

    def __init__(self, line, column, type_name, field_name):
        self.type_name = type_name
        self.field_name = field_name
        super().__init__(
            line, column, f"type {type_name!r} has no field {field_name!r}"
        )


class ArgumentError(QueryError):
    """Raised for unknown, misplaced, or mistyped field arguments"""

    pass


class SelectionError(QueryError):
    """
    Raised when a selection set does not match the selected field's type or
    selects a response key twice
    """

    pass


class UnsupportedQueryError(QueryError):
    """Raised for query constructs outside of the supported subset"""

    def __init__(self, line, column, construct):
        self.construct = construct
        super().__init__(line, column, f"unsupported: {construct}")


class ExecutionError(MinimizerError):
    """
    Raised when a reduction fails on a validated request, which means the
    policy/schema validation let an incompatible combination through
    """

    def __init__(self, field, directive, cause):
        #: Qualified ``Type.field`` name
        self.field = field
        self.directive = directive
        self.cause = cause

    def __str__(self):
        return f"@{self.directive} failed on {self.field}: {self.cause}"


class DataIntegrityError(MinimizerError):
    """
    Raised when a data source holds duplicate records, dangling links, or
    unreadable lines
    """

    pass


class ConfigError(MinimizerError):
    """Raised for invalid service or authentication settings"""

    pass


class StartupError(ConfigError):
    """Raised when startup validation produces diagnostics"""

    def __init__(self, diagnostics):
        #: List of ``(path, Diagnostic)`` pairs
        self.diagnostics = diagnostics

    def __str__(self):
        return "\n".join(f"{path}:{d}" for path, d in self.diagnostics)


class BenchError(MinimizerError):
    """Superclass for benchmark harness errors"""

    pass


class BenchConfigError(BenchError):
    """Raised for benchmark configurations that cannot yield a report"""

    pass


class TargetUnreachableError(BenchError):
    """Raised when the benchmark target does not answer its health check"""

    def __init__(self, url, cause):
        self.url = url
        self.cause = cause

    def __str__(self):
        return f"Benchmark target {self.url} is unreachable: {self.cause}"


class BenchRequestError(BenchError):
    """Raised when a request during measurement gets a non-200 response"""

    def __init__(self, status_code, body):
        self.status_code = status_code
        self.body = body

    def __str__(self):
        return f"Benchmark request failed with HTTP {self.status_code}: {self.body}"
