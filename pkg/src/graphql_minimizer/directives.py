"""
The schema directives understood by the gateway and how each one maps policy
parameters onto a transform from `graphql_minimizer.reduction`
"""

import attr
from . import reduction
from .errors import ParameterError
from .reduction import GeneralizationParams, HashParams, NoiseParams

NUMBER_TYPES = frozenset({"Int", "Float"})


@attr.s(frozen=True)
class Directive:
    name = attr.ib()
    #: Named scalar types the directive may be attached to, or `None` if it
    #: may be attached to any field
    targets = attr.ib()
    #: Normalized names of the policy fields the directive takes as parameters
    parameters = attr.ib()
    #: ``(dict) -> params``; builds the directive's parameter object from the
    #: policy fields that were given, raising `ParameterError` on bad values
    build = attr.ib(repr=False)
    #: ``(value, params, rng) -> value``
    transform = attr.ib(repr=False)
    #: ``(params, type_name) -> str | None``; complains if ``params`` cannot
    #: handle values of the given field type
    check_target = attr.ib(repr=False, default=lambda _params, _type_name: None)
    #: Whether the directive may only be attached to nullable fields
    nullable_only = attr.ib(default=False)
    #: Whether applying the directive ends the field's pipeline
    terminal = attr.ib(default=False)

    def accepts_type(self, type_name):
        return self.targets is None or type_name in self.targets


def _no_params(_params):
    return None


def _build_generalization(params):
    if not params:
        raise ParameterError(
            "generalize requires at least one of step, unit, visible_count"
        )
    return GeneralizationParams(**params)


def _check_generalization(params, type_name):
    if type_name in NUMBER_TYPES:
        if params.step is None:
            return f"generalizing {type_name} requires step"
        if type_name == "Int" and not float(params.step).is_integer():
            return f"generalizing Int requires an integral step, got {params.step!r}"
    elif type_name == "Date" and params.unit is None:
        return "generalizing Date requires unit"
    elif type_name == "String" and params.visible_count is None:
        return "generalizing String requires visible_count"
    return None


def _build_noise(params):
    params = dict(params)
    try:
        distribution = params.pop("distribution")
    except KeyError:
        raise ParameterError("noise requires a distribution")
    kwargs = {}
    if "date_unit" in params:
        kwargs["date_unit"] = params.pop("date_unit")
    return NoiseParams(distribution, params, **kwargs)


def _check_noise(params, type_name):
    if type_name != "Date" and params.date_unit != "second":
        return f"date_unit has no effect on {type_name} fields"
    return None


def _build_hash(params):
    return HashParams(**params)


DIRECTIVES = {
    d.name: d
    for d in [
        Directive(
            name="suppress",
            targets=None,
            parameters=frozenset(),
            build=_no_params,
            transform=lambda value, _params, _rng: reduction.suppress(value),
            nullable_only=True,
            terminal=True,
        ),
        Directive(
            name="generalize",
            targets=frozenset({"Int", "Float", "String", "Date"}),
            parameters=frozenset({"step", "unit", "visible_count", "mask_char"}),
            build=_build_generalization,
            transform=lambda value, params, _rng: reduction.generalize(value, params),
            check_target=_check_generalization,
        ),
        Directive(
            name="noise",
            targets=frozenset({"Int", "Float", "Date"}),
            parameters=frozenset(
                {
                    "distribution",
                    "location",
                    "scale",
                    "mean",
                    "std_dev",
                    "low",
                    "high",
                    "date_unit",
                }
            ),
            build=_build_noise,
            transform=reduction.noise,
            check_target=_check_noise,
        ),
        Directive(
            name="hash",
            targets=frozenset({"String", "ID"}),
            parameters=frozenset({"output_bits"}),
            build=_build_hash,
            transform=lambda value, params, _rng: reduction.hash_value(value, params),
        ),
        Directive(
            name="noop",
            targets=None,
            parameters=frozenset(),
            build=_no_params,
            transform=lambda value, _params, _rng: reduction.noop(value),
        ),
    ]
}
