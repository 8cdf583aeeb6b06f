"""
Role-dependent directive parameters

A policy file is a sequence of header stanzas separated by blank lines; lines
beginning with ``#`` are comments.  One optional settings stanza sets the
verdict for combinations the policy does not mention; every other stanza is
an entry for one role, field, and directive::

    Default-Verdict: suppress

    Role: researcher
    Field: Symptom.pain
    Directive: noise
    Distribution: laplace
    Location: 0
    Scale: 1

    Role: admin
    Field: User.name
    Directive: suppress
    Verdict: pass

An entry's ``Verdict`` is ``apply`` (the default; run the directive with the
given parameters), ``pass`` (leave the value alone), or ``suppress`` (replace
it with null and skip the rest of the field's directives).
"""

import logging
from typing import List
import attr
import headerparser
from headerparser import HeaderParser
from . import errors
from .directives import DIRECTIVES
from .util import fieldnorm, is_qualified_field, parse_number, split_qualified

log = logging.getLogger(__name__)

VERDICT_KINDS = ("apply", "pass", "suppress")


@attr.s(frozen=True)
class Verdict:
    kind = attr.ib(validator=attr.validators.in_(VERDICT_KINDS))
    #: The directive's parameter object for ``apply`` verdicts; `None` for
    #: directives without parameters and for other verdicts
    params = attr.ib(default=None)

    def for_json(self):
        return {
            "verdict": self.kind,
            "params": attr.asdict(self.params) if self.params is not None else None,
        }


PASS = Verdict("pass")
SUPPRESS = Verdict("suppress")


@attr.s(frozen=True)
class PolicyEntry:
    role = attr.ib()
    #: Qualified ``Type.field`` name
    field = attr.ib()
    directive = attr.ib()
    verdict = attr.ib()
    line = attr.ib(default=1, eq=False, repr=False)

    @property
    def key(self):
        return (self.role, self.field, self.directive)

    def for_json(self):
        return {
            "role": self.role,
            "field": self.field,
            "directive": self.directive,
            **self.verdict.for_json(),
        }


@attr.s(frozen=True)
class Policy:
    #: `dict` mapping ``(role, field, directive)`` triples to `PolicyEntry`\s
    entries = attr.ib(factory=dict)
    default_verdict = attr.ib(default=SUPPRESS)

    @property
    def roles(self):
        return sorted({role for role, _, _ in self.entries})

    def resolve_verdict(self, role, field, directive) -> Verdict:
        try:
            return self.entries[(role, field, directive)].verdict
        except KeyError:
            return self.default_verdict

    def for_json(self):
        return {
            "default_verdict": self.default_verdict.kind,
            "entries": [e.for_json() for e in self.entries.values()],
        }


def resolve_verdict(policy: Policy, role, field, directive) -> Verdict:
    """
    Return the verdict ``policy`` gives ``role`` for ``directive`` on the
    qualified field ``field``, falling back to the policy's default verdict
    """
    return policy.resolve_verdict(role, field, directive)


settings_parser = HeaderParser(normalizer=fieldnorm, body=False)
settings_parser.add_field(
    "Default-Verdict", choices=["pass", "suppress"], required=True
)

entry_parser = HeaderParser(normalizer=fieldnorm, body=False)
entry_parser.add_field("Role", required=True)
entry_parser.add_field("Field", required=True)
entry_parser.add_field("Directive", required=True)
entry_parser.add_field("Verdict", choices=list(VERDICT_KINDS), default="apply")
for field in "Step Location Scale Mean Std-Dev Low High".split():
    entry_parser.add_field(field, type=parse_number)
for field in "Visible-Count Output-Bits".split():
    entry_parser.add_field(field, type=int)
for field in "Unit Mask-Char Distribution Date-Unit".split():
    entry_parser.add_field(field)

ENTRY_KEYS = ("role", "field", "directive", "verdict")


def load_policy(config_text: str) -> Policy:
    """
    Parse the text of a policy file and validate every entry's parameters.

    :raises PolicyError: if the file is malformed, names an unknown
        directive, or gives a directive invalid parameters
    """
    default_verdict = SUPPRESS
    settings_line = None
    entries = {}
    for stanza in split_stanzas(config_text):
        if "role" in header_names(stanza):
            entry = _parse_entry(stanza)
            if entry.key in entries:
                raise errors.DuplicateEntryError(entry.line, entry.key)
            entries[entry.key] = entry
        else:
            if settings_line is not None:
                raise errors.PolicySyntaxError(
                    stanza[0][0],
                    f"second settings stanza (the first is on line {settings_line})",
                )
            settings_line = stanza[0][0]
            fields = _parse_stanza(settings_parser, stanza)
            default_verdict = PASS if fields["default_verdict"] == "pass" else SUPPRESS
    log.debug(
        "Loaded policy with %d entries; default verdict is %s",
        len(entries),
        default_verdict.kind,
    )
    return Policy(entries=entries, default_verdict=default_verdict)


def split_stanzas(text):
    """
    Split policy text into stanzas, each a list of ``(lineno, line)`` pairs,
    dropping comment lines
    """
    stanza = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.startswith("#"):
            continue
        elif not line.strip():
            if stanza:
                yield stanza
                stanza = []
        else:
            stanza.append((lineno, line))
    if stanza:
        yield stanza


def header_names(stanza):
    return {
        fieldnorm(line.partition(":")[0].strip())
        for _, line in stanza
        if not line[:1].isspace()
    }


def _parse_stanza(parser, stanza):
    try:
        return parser.parse_string(
            "".join(line + "\n" for _, line in stanza)
        ).normalized_dict()
    except headerparser.Error as e:
        raise errors.PolicySyntaxError(_error_line(e, stanza), str(e))


def _error_line(e, stanza):
    bad_line = getattr(e, "line", None)
    if isinstance(bad_line, str):
        for lineno, line in stanza:
            if line == bad_line.rstrip("\r\n"):
                return lineno
    name = getattr(e, "name", None)
    if isinstance(name, str):
        for lineno, line in reversed(stanza):
            if not line[:1].isspace() and fieldnorm(
                line.partition(":")[0].strip()
            ) == fieldnorm(name):
                return lineno
    return stanza[0][0]


def _parse_entry(stanza):
    line = stanza[0][0]
    fields = _parse_stanza(entry_parser, stanza)
    role, field, directive_name, verdict_kind = (fields.pop(k) for k in ENTRY_KEYS)
    if not role or any(c.isspace() for c in role):
        raise errors.PolicySyntaxError(line, f"invalid role {role!r}")
    if not is_qualified_field(field):
        raise errors.PolicySyntaxError(
            line, f"field must be written as Type.field, got {field!r}"
        )
    try:
        directive = DIRECTIVES[directive_name]
    except KeyError:
        raise errors.UnknownDirectiveError(line, directive_name)
    key = (role, field, directive_name)
    extra = sorted(set(fields) - directive.parameters)
    if extra:
        raise errors.InvalidParameterError(
            line, key, f"{directive_name} does not take {', '.join(extra)}"
        )
    if verdict_kind == "apply":
        try:
            verdict = Verdict("apply", directive.build(fields))
        except errors.ParameterError as e:
            raise errors.InvalidParameterError(line, key, e.message)
    elif fields:
        raise errors.InvalidParameterError(
            line, key, f"parameters given with a {verdict_kind} verdict"
        )
    else:
        verdict = PASS if verdict_kind == "pass" else SUPPRESS
    return PolicyEntry(
        role=role, field=field, directive=directive_name, verdict=verdict, line=line
    )


def check_policy(policy: Policy, schema) -> List[errors.Diagnostic]:
    """
    Check ``policy`` against ``schema``: every entry must name a field that
    exists and carries the entry's directive, and an ``apply`` entry's
    parameters must be able to handle the field's type
    """
    diagnostics = []
    for entry in policy.entries.values():
        tname, fname = split_qualified(entry.field)
        fdef = schema.get_field(tname, fname)
        if fdef is None:
            diagnostics.append(
                errors.Diagnostic(
                    entry.line, 1, f"{entry.field} is not defined in the schema"
                )
            )
        elif entry.directive not in fdef.attached_directives:
            diagnostics.append(
                errors.Diagnostic(
                    entry.line, 1, f"{entry.field} does not carry @{entry.directive}"
                )
            )
        elif entry.verdict.params is not None:
            complaint = DIRECTIVES[entry.directive].check_target(
                entry.verdict.params, fdef.type_ref.name
            )
            if complaint is not None:
                diagnostics.append(
                    errors.Diagnostic(entry.line, 1, f"{entry.field}: {complaint}")
                )
        if (
            fdef is not None
            and fdef.type_ref.non_null
            and entry.verdict.kind == "suppress"
        ):
            diagnostics.append(
                errors.Diagnostic(
                    entry.line, 1, f"cannot suppress non-null field {entry.field}"
                )
            )
    if policy.default_verdict.kind == "suppress":
        for tname, otype in schema.types.items():
            for fname, fdef in otype.fields.items():
                if fdef.type_ref.non_null and fdef.attached_directives:
                    diagnostics.append(
                        errors.Diagnostic(
                            1,
                            1,
                            "default verdict would suppress non-null field"
                            f" {tname}.{fname}",
                        )
                    )
    return diagnostics
