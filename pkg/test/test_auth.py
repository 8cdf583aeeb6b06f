from datetime import datetime, timedelta, timezone
import json
import random
import pytest
from graphql_minimizer.auth import AuthConfig, bearer_token, extract_role, issue_token
from graphql_minimizer.errors import AuthenticationError, ConfigError
from testing_lib import (
    AUTH,
    OTHER_SECRET,
    SECRET,
    b64url,
    ref_classify,
    ref_sign,
    unb64url,
)

NOW = datetime(2023, 6, 1, 12, 0, 0, tzinfo=timezone.utc)


def classify(token, auth=AUTH, now=NOW):
    try:
        extract_role(token, auth, now)
    except AuthenticationError as e:
        if e.reason == "token expired":
            return "expired"
        elif e.reason.startswith("invalid token"):
            return "invalid"
        elif e.reason.startswith("missing or invalid"):
            return "missing-claim"
        else:
            raise
    return "valid"


def random_token(rng):
    now_ts = int(NOW.timestamp())
    kind = rng.choice(["valid", "expired", "tampered", "wrong-secret", "no-role"])
    claims = {"role": rng.choice(["admin", "researcher", "analyst"])}
    if kind == "expired":
        claims["exp"] = now_ts - rng.choice([0, 1, 60, 86400])
    elif rng.random() < 0.7:
        claims["exp"] = now_ts + rng.randint(1, 86400)
    if kind == "no-role":
        claims["role"] = rng.choice([None, "", "two words", 42, ["admin"]])
        if rng.random() < 0.5:
            del claims["role"]
    token = ref_sign(claims, OTHER_SECRET if kind == "wrong-secret" else SECRET)
    if kind == "tampered":
        header, _, sig = token.split(".")
        forged = dict(claims, role="admin-" + claims["role"])
        token = ".".join([header, b64url(json.dumps(forged).encode("utf-8")), sig])
    return token


@pytest.mark.parametrize("seed", range(50))
def test_extract_role_matches_reference(seed):
    token = random_token(random.Random(seed))
    expected = ref_classify(token, NOW.timestamp())
    assert classify(token) == expected
    if expected == "valid":
        claims = json.loads(unb64url(token.split(".")[1]))
        assert extract_role(token, AUTH, NOW) == claims["role"]


def test_extract_role():
    token = ref_sign({"role": "researcher", "exp": NOW.timestamp() + 1})
    assert extract_role(token, AUTH, NOW) == "researcher"
    assert classify(token, now=NOW + timedelta(seconds=1)) == "expired"


def test_extract_role_custom_claim():
    auth = AuthConfig(SECRET, role_claim="grp")
    token = ref_sign({"grp": "analyst", "role": "admin"})
    assert extract_role(token, auth, NOW) == "analyst"
    assert classify(ref_sign({"role": "admin"}), auth=auth) == "missing-claim"


@pytest.mark.parametrize(
    "header",
    [
        {"alg": "none", "typ": "JWT"},
        {"alg": "HS512", "typ": "JWT"},
    ],
)
def test_extract_role_wrong_algorithm(header):
    token = ref_sign({"role": "admin"}, header=header)
    assert classify(token) == "invalid"


@pytest.mark.parametrize("token", ["", "abc", "a.b.c", "a.b", "...."])
def test_extract_role_garbage(token):
    assert classify(token) == "invalid"


def test_malformed_exp():
    token = ref_sign({"role": "admin", "exp": "tomorrow"})
    with pytest.raises(AuthenticationError) as excinfo:
        extract_role(token, AUTH, NOW)
    assert excinfo.value.reason == "malformed exp claim"


def test_no_token():
    with pytest.raises(AuthenticationError) as excinfo:
        extract_role(None, AUTH, NOW)
    assert str(excinfo.value) == "Authentication failed: no bearer token"
    auth = AuthConfig(SECRET, anonymous_role="public")
    assert extract_role(None, auth, NOW) == "public"


def test_anonymous_role_does_not_cover_bad_tokens():
    auth = AuthConfig(SECRET, anonymous_role="public")
    with pytest.raises(AuthenticationError):
        extract_role(ref_sign({"role": "admin"}, OTHER_SECRET), auth, NOW)


@pytest.mark.parametrize(
    "authorization,token",
    [
        (None, None),
        ("Bearer abc.def.ghi", "abc.def.ghi"),
        ("bearer abc.def.ghi", "abc.def.ghi"),
        ("  Bearer   abc.def.ghi  ", "abc.def.ghi"),
    ],
)
def test_bearer_token(authorization, token):
    assert bearer_token(authorization) == token


@pytest.mark.parametrize("authorization", ["", "Bearer", "Bearer ", "Basic dXNlcg=="])
def test_bad_bearer_token(authorization):
    with pytest.raises(AuthenticationError) as excinfo:
        bearer_token(authorization)
    assert excinfo.value.reason == "malformed Authorization header"


def test_issue_token():
    token = issue_token("analyst", AUTH, expires_in=60, now=NOW)
    assert ref_classify(token, NOW.timestamp()) == "valid"
    assert extract_role(token, AUTH, NOW) == "analyst"
    assert extract_role(token, AUTH, NOW + timedelta(seconds=59)) == "analyst"
    assert classify(token, now=NOW + timedelta(seconds=60)) == "expired"


@pytest.mark.parametrize("role", ["", "two words", None])
def test_issue_token_bad_role(role):
    with pytest.raises(ConfigError):
        issue_token(role, AUTH)


def test_short_secret():
    with pytest.raises(ConfigError) as excinfo:
        AuthConfig("hunter2")
    assert str(excinfo.value) == "hmac_secret must be at least 32 bytes long"


def test_bad_anonymous_role():
    with pytest.raises(ConfigError):
        AuthConfig(SECRET, anonymous_role="two words")


def test_secret_not_in_repr():
    assert SECRET not in repr(AUTH)
