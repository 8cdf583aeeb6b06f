from datetime import datetime, timezone
from fractions import Fraction
import math
import re
from typing import Union

EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)

MAX_DATE = datetime(9999, 12, 31, 23, 59, 59, tzinfo=timezone.utc)

QUALIFIED_FIELD_RGX = re.compile(r"[_A-Za-z][_0-9A-Za-z]*\.[_A-Za-z][_0-9A-Za-z]*")


def utc(dt: datetime) -> datetime:
    """
    Normalize a `datetime` to an aware UTC value with whole-second precision.
    Naive values are taken to already be in UTC.
    """
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    else:
        dt = dt.astimezone(timezone.utc)
    return dt.replace(microsecond=0)


def parse_datetime(s: str) -> datetime:
    # `fromisoformat()` only learned to accept "Z" in Python 3.11
    if s.endswith(("Z", "z")):
        s = s[:-1] + "+00:00"
    return utc(datetime.fromisoformat(s))


def format_datetime(dt: datetime) -> str:
    """Render a date as an RFC 3339 UTC timestamp, e.g. ``2022-03-01T00:00:00Z``"""
    return utc(dt).strftime("%Y-%m-%dT%H:%M:%SZ")


def round_half_away(x: Union[float, Fraction]) -> int:
    """
    Round to the nearest integer, with ties going away from zero.  Exact for
    `float`, `int`, and `~fractions.Fraction` arguments of any size.
    """
    a = abs(x)
    n = math.floor(a)
    if a - n >= Fraction(1, 2):
        n += 1
    return -n if x < 0 else n


def parse_number(s: str) -> Union[int, float]:
    """
    Parse a policy-file number.  Integer literals stay `int`; anything else is
    parsed as a `float`.
    """
    s = s.strip()
    try:
        return int(s)
    except ValueError:
        x = float(s)
        if not math.isfinite(x):
            raise ValueError(f"not a finite number: {s!r}")
        return x


def fieldnorm(s):
    return s.lower().replace("-", "_")


def split_qualified(name: str):
    """Split ``"Type.field"`` into ``("Type", "field")``"""
    type_name, _, field_name = name.partition(".")
    return type_name, field_name


def is_qualified_field(name: str) -> bool:
    return QUALIFIED_FIELD_RGX.fullmatch(name) is not None
