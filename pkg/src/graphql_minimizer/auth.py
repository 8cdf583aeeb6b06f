from datetime import datetime, timezone
from typing import Optional
import attr
import jwt
from . import errors
from .reduction import is_number

MIN_SECRET_LENGTH = 32

#: Registered claims other than ``exp`` are not checked
DECODE_OPTIONS = {
    "verify_signature": True,
    "verify_exp": False,
    "verify_nbf": False,
    "verify_iat": False,
    "verify_aud": False,
    "verify_iss": False,
}


def is_role_name(s):
    return isinstance(s, str) and s != "" and not any(c.isspace() for c in s)


def _to_bytes(value):
    return value.encode("utf-8") if isinstance(value, str) else value


def _check_secret(_inst, attribute, value):
    if not isinstance(value, bytes) or len(value) < MIN_SECRET_LENGTH:
        raise errors.ConfigError(
            f"{attribute.name} must be at least {MIN_SECRET_LENGTH} bytes long"
        )


def _check_role(_inst, attribute, value):
    if value is not None and not is_role_name(value):
        raise errors.ConfigError(f"{attribute.name} is not a valid role: {value!r}")


@attr.s(frozen=True)
class AuthConfig:
    hmac_secret = attr.ib(repr=False, converter=_to_bytes, validator=_check_secret)
    #: Name of the JWT claim holding the requester's role
    role_claim = attr.ib(default="role")
    #: Role given to requests that carry no token; `None` rejects them
    anonymous_role = attr.ib(default=None, validator=_check_role)


def bearer_token(authorization: Optional[str]) -> Optional[str]:
    """
    Extract the token from the value of an :mailheader:`Authorization` header.
    Returns `None` if the header is absent.
    """
    if authorization is None:
        return None
    scheme, _, token = authorization.strip().partition(" ")
    token = token.strip()
    if scheme.lower() != "bearer" or not token:
        raise errors.AuthenticationError("malformed Authorization header")
    return token


def extract_role(token: Optional[str], auth: AuthConfig, now: datetime) -> str:
    """
    Verify an HS256 JWT and return the role it carries.  A token whose
    ``exp`` is at or before ``now`` is rejected.  A missing token (`None`)
    yields the configured anonymous role, if any.

    :raises AuthenticationError: if the token is absent with no anonymous
        role configured, malformed, badly signed, expired, or lacks the role
        claim
    """
    if token is None:
        if auth.anonymous_role is not None:
            return auth.anonymous_role
        raise errors.AuthenticationError("no bearer token")
    try:
        claims = jwt.decode(
            token, auth.hmac_secret, algorithms=["HS256"], options=DECODE_OPTIONS
        )
    except jwt.InvalidTokenError as e:
        raise errors.AuthenticationError(f"invalid token ({type(e).__name__})")
    if "exp" in claims:
        exp = claims["exp"]
        if not is_number(exp):
            raise errors.AuthenticationError("malformed exp claim")
        if exp <= now.timestamp():
            raise errors.AuthenticationError("token expired")
    role = claims.get(auth.role_claim)
    if not is_role_name(role):
        raise errors.AuthenticationError(
            f"missing or invalid {auth.role_claim!r} claim"
        )
    return role


def issue_token(
    role: str, auth: AuthConfig, expires_in: int = 3600, now: Optional[datetime] = None
) -> str:
    """Mint an HS256 JWT granting ``role`` for ``expires_in`` seconds"""
    if not is_role_name(role):
        raise errors.ConfigError(f"not a valid role: {role!r}")
    if now is None:
        now = datetime.now(timezone.utc)
    issued = int(now.timestamp())
    claims = {auth.role_claim: role, "iat": issued, "exp": issued + expires_in}
    return jwt.encode(claims, auth.hmac_secret, algorithm="HS256")
