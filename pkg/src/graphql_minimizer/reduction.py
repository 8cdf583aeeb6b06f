"""
Information reduction transforms over scalar values

This module is the value-level half of the package: pure functions that
suppress, generalize, noise, or hash a single scalar.  It knows nothing about
schemas, roles, or requests and can be used on its own::

    from graphql_minimizer.reduction import GeneralizationParams, generalize_number

    generalize_number(17, GeneralizationParams(step=10))  # -> 10

Scalars are plain Python values: `int`, `float`, `str`, an aware UTC
`datetime` (whole seconds), or `None` for null.
"""

from datetime import datetime, timedelta
from fractions import Fraction
import hashlib
import math
from numbers import Real
import attr
import numpy as np
from .errors import ParameterError, ValueRangeError, ValueTypeError
from .util import EPOCH, MAX_DATE, round_half_away, utc

#: Units a date can be truncated to, finest first
DATE_UNITS = ("second", "minute", "hour", "day", "month", "year")

#: Units a date noise sample can be expressed in, with their length in seconds
NOISE_DATE_UNITS = {
    "second": 1,
    "minute": 60,
    "hour": 3600,
    "day": 86400,
}

HASH_BITS = (224, 256, 384, 512)

_TRUNCATIONS = {
    "second": {},
    "minute": {"second": 0},
    "hour": {"minute": 0, "second": 0},
    "day": {"hour": 0, "minute": 0, "second": 0},
    "month": {"day": 1, "hour": 0, "minute": 0, "second": 0},
    "year": {"month": 1, "day": 1, "hour": 0, "minute": 0, "second": 0},
}


def scalar_kind(value):
    """
    Classify a value as one of ``"int"``, ``"float"``, ``"text"``, ``"date"``,
    or ``"null"``.  Booleans are reported as ``"boolean"`` and are never
    numeric.
    """
    if value is None:
        return "null"
    elif isinstance(value, bool):
        return "boolean"
    elif isinstance(value, int):
        return "int"
    elif isinstance(value, float):
        return "float"
    elif isinstance(value, str):
        return "text"
    elif isinstance(value, datetime):
        return "date"
    else:
        return type(value).__name__


def is_number(x):
    return isinstance(x, Real) and not isinstance(x, bool) and math.isfinite(x)


def _optional_positive_number(_inst, attribute, value):
    if value is not None and not (is_number(value) and value > 0):
        raise ParameterError(
            f"{attribute.name} must be a positive number, got {value!r}"
        )


def _optional_non_negative_int(_inst, attribute, value):
    if value is not None and (
        not isinstance(value, int) or isinstance(value, bool) or value < 0
    ):
        raise ParameterError(
            f"{attribute.name} must be a non-negative integer, got {value!r}"
        )


def _single_char(_inst, attribute, value):
    if not isinstance(value, str) or len(value) != 1:
        raise ParameterError(
            f"{attribute.name} must be a single character, got {value!r}"
        )


def _choice(choices, optional=False):
    def validator(_inst, attribute, value):
        if optional and value is None:
            return
        if value not in choices:
            raise ParameterError(
                f"{attribute.name} must be one of"
                f" {', '.join(map(str, choices))}; got {value!r}"
            )

    return validator


@attr.s(frozen=True)
class GeneralizationParams:
    #: Bucket width for numbers
    step = attr.ib(default=None, validator=_optional_positive_number)
    #: Truncation unit for dates
    unit = attr.ib(default=None, validator=_choice(DATE_UNITS, optional=True))
    #: Number of leading characters of a string left in plain text
    visible_count = attr.ib(default=None, validator=_optional_non_negative_int)
    mask_char = attr.ib(default="*", validator=_single_char)


@attr.s(frozen=True)
class Distribution:
    """A noise distribution that can be named in `NoiseParams`"""

    name = attr.ib()
    #: Names of the distribution's parameters, all required
    parameters = attr.ib()
    #: ``(numpy.random.Generator, params) -> float``
    sampler = attr.ib(repr=False)
    #: ``params -> str | None``; returns a complaint about invalid values
    checker = attr.ib(repr=False)
    #: ``params -> float``; theoretical mean
    mean = attr.ib(repr=False)
    #: ``params -> float``; theoretical variance
    variance = attr.ib(repr=False)

    def validate(self, params):
        missing = [p for p in self.parameters if p not in params]
        if missing:
            raise ParameterError(
                f"{self.name} noise requires {', '.join(missing)}"
            )
        extra = sorted(set(params) - set(self.parameters))
        if extra:
            raise ParameterError(
                f"{self.name} noise does not take {', '.join(extra)}"
            )
        for k, v in params.items():
            if not is_number(v):
                raise ParameterError(f"{k} must be a finite number, got {v!r}")
        complaint = self.checker(params)
        if complaint is not None:
            raise ParameterError(complaint)


#: Registry of noise distributions by name
DISTRIBUTIONS = {}


def register_distribution(dist):
    DISTRIBUTIONS[dist.name] = dist
    return dist


def get_distribution(name):
    try:
        return DISTRIBUTIONS[name]
    except KeyError:
        raise ParameterError(f"unknown noise distribution {name!r}")


register_distribution(
    Distribution(
        name="laplace",
        parameters=("location", "scale"),
        sampler=lambda gen, p: gen.laplace(p["location"], p["scale"]),
        checker=lambda p: None if p["scale"] > 0 else "laplace scale must be positive",
        mean=lambda p: p["location"],
        variance=lambda p: 2 * p["scale"] ** 2,
    )
)

register_distribution(
    Distribution(
        name="normal",
        parameters=("mean", "std_dev"),
        sampler=lambda gen, p: gen.normal(p["mean"], p["std_dev"]),
        checker=lambda p: (
            None if p["std_dev"] >= 0 else "normal std_dev must not be negative"
        ),
        mean=lambda p: p["mean"],
        variance=lambda p: p["std_dev"] ** 2,
    )
)

register_distribution(
    Distribution(
        name="uniform",
        parameters=("low", "high"),
        sampler=lambda gen, p: gen.uniform(p["low"], p["high"]),
        checker=lambda p: (
            None if p["low"] <= p["high"] else "uniform low must not exceed high"
        ),
        mean=lambda p: (p["low"] + p["high"]) / 2,
        variance=lambda p: (p["high"] - p["low"]) ** 2 / 12,
    )
)


@attr.s(frozen=True)
class NoiseParams:
    distribution = attr.ib()
    dist_params = attr.ib(factory=dict, converter=dict)
    #: Unit a sample is expressed in when noising dates
    date_unit = attr.ib(default="second", validator=_choice(tuple(NOISE_DATE_UNITS)))

    def __attrs_post_init__(self):
        get_distribution(self.distribution).validate(self.dist_params)


@attr.s(frozen=True)
class HashParams:
    output_bits = attr.ib(default=256, validator=_choice(HASH_BITS))


class RandomSource:
    """
    Deterministic source of noise samples.  The same seed and the same
    sequence of calls yield the same samples.  Instances are not thread-safe;
    give each request its own.
    """

    def __init__(self, seed: int):
        self.seed = seed
        self._generator = np.random.Generator(
            np.random.PCG64(seed & 0xFFFFFFFFFFFFFFFF)
        )

    def sample(self, distribution, dist_params) -> float:
        dist = get_distribution(distribution)
        return float(dist.sampler(self._generator, dist_params))

    def __repr__(self):
        return f"{type(self).__name__}(seed={self.seed!r})"


def generalize_number(value, params):
    """
    Replace a number with the lower bound of the ``params.step``-wide bucket
    containing it, so that ``r <= value < r + step``.  Integers stay integers
    and require an integral step.
    """
    kind = scalar_kind(value)
    if kind not in ("int", "float"):
        raise ValueTypeError("generalize_number", kind)
    step = params.step
    if step is None:
        raise ParameterError("generalizing a number requires a step")
    if kind == "int":
        if isinstance(step, float):
            if not step.is_integer():
                raise ParameterError(
                    "integers can only be generalized with an integral step,"
                    f" got {step!r}"
                )
            step = int(step)
        return (value // step) * step
    q = value / step
    if not (math.isfinite(q) and abs(q) < 2**53):
        # Quotient overflows or is too large for float steps to be exact
        exact = Fraction(step)
        return float(math.floor(Fraction(value) / exact) * exact)
    q = math.floor(q)
    # The division can round across a bucket boundary
    while q * step > value:
        q -= 1
    while (q + 1) * step <= value:
        q += 1
    return float(q * step)


def generalize_string(value, params):
    """
    Keep the first ``params.visible_count`` characters of a string and replace
    the rest with ``params.mask_char``.  The length of the string is preserved.
    """
    kind = scalar_kind(value)
    if kind != "text":
        raise ValueTypeError("generalize_string", kind)
    n = params.visible_count
    if n is None:
        raise ParameterError("generalizing a string requires visible_count")
    return value[:n] + params.mask_char * max(0, len(value) - n)


def generalize_date(value, params):
    """Truncate a date to the start of its containing ``params.unit``"""
    kind = scalar_kind(value)
    if kind != "date":
        raise ValueTypeError("generalize_date", kind)
    if params.unit is None:
        raise ParameterError("generalizing a date requires a unit")
    return utc(value).replace(**_TRUNCATIONS[params.unit])


def generalize(value, params):
    """Dispatch to the generalization for the value's kind"""
    kind = scalar_kind(value)
    if kind in ("int", "float"):
        return generalize_number(value, params)
    elif kind == "text":
        return generalize_string(value, params)
    elif kind == "date":
        return generalize_date(value, params)
    else:
        raise ValueTypeError("generalize", kind)


def noise_number(value, params, rng):
    kind = scalar_kind(value)
    if kind not in ("int", "float"):
        raise ValueTypeError("noise_number", kind)
    sample = rng.sample(params.distribution, params.dist_params)
    if kind == "int":
        # Exact, so that integers beyond 2**53 survive a zero offset
        return round_half_away(value + Fraction(sample))
    else:
        return value + sample


def noise_date(value, params, rng):
    kind = scalar_kind(value)
    if kind != "date":
        raise ValueTypeError("noise_date", kind)
    sample = rng.sample(params.distribution, params.dist_params)
    offset = round_half_away(sample * NOISE_DATE_UNITS[params.date_unit])
    try:
        result = utc(value) + timedelta(seconds=offset)
    except OverflowError:
        raise ValueRangeError(value, offset)
    if not (EPOCH <= result <= MAX_DATE):
        raise ValueRangeError(value, offset)
    return result


def noise(value, params, rng):
    """Dispatch to the noising for the value's kind"""
    if scalar_kind(value) == "date":
        return noise_date(value, params, rng)
    else:
        return noise_number(value, params, rng)


def hash_value(value, params):
    """
    Return the lowercase hex SHA-3 digest of a string's UTF-8 encoding, with
    ``params.output_bits`` bits of output
    """
    kind = scalar_kind(value)
    if kind != "text":
        raise ValueTypeError("hash_value", kind)
    return hashlib.new(f"sha3_{params.output_bits}", value.encode("utf-8")).hexdigest()


def suppress(_value):
    return None


def noop(value):
    return value
