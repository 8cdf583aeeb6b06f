import logging
from fastapi.testclient import TestClient
import pytest
from graphql_minimizer.auth import AuthConfig, issue_token
from graphql_minimizer.dataset import generate_dataset
from graphql_minimizer.datasource import MemoryDataSource
from graphql_minimizer.engine import RequestSeeder, execute, resolve
from graphql_minimizer.errors import ConfigError, StartupError
from graphql_minimizer.policy import load_policy
from graphql_minimizer.query import parse_query
from graphql_minimizer.reduction import RandomSource
from graphql_minimizer.schema import parse_schema
from graphql_minimizer.service import (
    Gateway,
    ServiceConfig,
    create_app,
    validate_sources,
)
from testing_lib import AUTH, OTHER_SECRET, SECRET, packaged_text, ref_sign

SEED = 7

PAIN_QUERY = "{ symptoms(first: 10) { id pain } }"


@pytest.fixture(scope="module")
def gateway():
    return Gateway.from_config(
        ServiceConfig(auth=AUTH, seed=SEED, dataset_users=20, fixed_rng=True)
    )


@pytest.fixture(scope="module")
def client(gateway):
    with TestClient(create_app(gateway)) as c:
        yield c


def bearer(role, secret=SECRET):
    return {"Authorization": f"Bearer {ref_sign({'role': role}, secret)}"}


def test_healthz(client):
    r = client.get("/healthz")
    assert r.status_code == 200
    assert r.text == "ok"


def test_researcher_query(client, gateway):
    r = client.post(
        "/graphql", json={"query": PAIN_QUERY}, headers=bearer("researcher")
    )
    assert r.status_code == 200
    expected = execute(
        PAIN_QUERY,
        gateway.schema,
        gateway.source,
        gateway.policy,
        "researcher",
        RandomSource(SEED),
    )
    assert r.json() == {"data": expected.for_json()}
    raw = resolve(parse_query(PAIN_QUERY, gateway.schema), gateway.source)
    assert len(r.json()["data"]["symptoms"]) == 10
    assert r.json()["data"] != raw.for_json()


def test_fixed_rng_repeats(client):
    bodies = [
        client.post(
            "/graphql", json={"query": PAIN_QUERY}, headers=bearer("researcher")
        ).json()
        for _ in range(3)
    ]
    assert bodies[0] == bodies[1] == bodies[2]


def test_varying_rng():
    gw = Gateway.from_config(ServiceConfig(auth=AUTH, seed=SEED, dataset_users=5))
    with TestClient(create_app(gw)) as c:
        a, b = (
            c.post(
                "/graphql", json={"query": PAIN_QUERY}, headers=bearer("researcher")
            ).json()
            for _ in range(2)
        )
    assert a != b


def test_admin_sees_source_values(client, gateway):
    query = "{ users(first: 3) { name email } }"
    r = client.post("/graphql", json={"query": query}, headers=bearer("admin"))
    assert r.status_code == 200
    raw = resolve(parse_query(query, gateway.schema), gateway.source)
    assert r.json() == {"data": raw.for_json()}


def test_unknown_role_gets_nulls(client):
    r = client.post(
        "/graphql",
        json={"query": "{ users(first: 2) { id name email } }"},
        headers=bearer("intern"),
    )
    assert r.status_code == 200
    assert r.json() == {
        "data": {
            "users": [
                {"id": "user-1", "name": None, "email": None},
                {"id": "user-2", "name": None, "email": None},
            ]
        }
    }


def test_issued_token(client):
    token = issue_token("analyst", AUTH)
    r = client.post(
        "/graphql",
        json={"query": "{ profiles(first: 1) { age } }", "operationName": None},
        headers={"Authorization": f"Bearer {token}"},
    )
    assert r.status_code == 200
    assert list(r.json()["data"]["profiles"][0]) == ["age"]


@pytest.mark.parametrize(
    "headers,message",
    [
        ({}, "Authentication failed: no bearer token"),
        (
            {"Authorization": "Basic dXNlcjpwYXNz"},
            "Authentication failed: malformed Authorization header",
        ),
        (
            bearer("admin", OTHER_SECRET),
            "Authentication failed: invalid token (InvalidSignatureError)",
        ),
        (
            {"Authorization": f"Bearer {ref_sign({'role': 'admin', 'exp': 1})}"},
            "Authentication failed: token expired",
        ),
        (
            {"Authorization": f"Bearer {ref_sign({'sub': 'someone'})}"},
            "Authentication failed: missing or invalid 'role' claim",
        ),
    ],
)
def test_unauthenticated(client, headers, message):
    r = client.post("/graphql", json={"query": PAIN_QUERY}, headers=headers)
    assert r.status_code == 401
    assert r.headers["WWW-Authenticate"] == "Bearer"
    assert r.json() == {"errors": [{"message": message}]}


@pytest.mark.parametrize(
    "kwargs,message",
    [
        ({"content": b"{not json"}, "Request body is not valid JSON"),
        ({"json": {}}, "Invalid request body: 'query' is a required property"),
        (
            {"json": {"query": 42}},
            "Invalid request body: 42 is not of type 'string'",
        ),
        ({"json": ["{ users { id } }"]}, None),
        ({"json": {"query": PAIN_QUERY, "variables": {"n": 1}}}, None),
        (
            {"json": {"query": "{ nope { id } }"}},
            "1:3: type 'Query' has no field 'nope'",
        ),
        (
            {"json": {"query": "mutation { users { id } }"}},
            "1:1: unsupported: mutation operations",
        ),
        ({"json": {"query": "{ users {"}}, None),
    ],
)
def test_bad_requests(client, kwargs, message):
    r = client.post("/graphql", headers=bearer("researcher"), **kwargs)
    assert r.status_code == 400
    (error,) = r.json()["errors"]
    if message is not None:
        assert error["message"] == message


def test_execution_error(caplog):
    schema = parse_schema(
        "directive @noise on FIELD_DEFINITION\n"
        "type Query { profiles: [Profile] }\n"
        "type Profile { id: ID! name: String @noise }\n"
    )
    policy = load_policy(
        "Role: r\nField: Profile.name\nDirective: noise\n"
        "Distribution: laplace\nLocation: 0\nScale: 1\n"
    )
    source = MemoryDataSource()
    source.add_record("Profile", {"id": "p1", "name": "Johanna"})
    gw = Gateway(
        schema=schema,
        policy=policy,
        source=source,
        auth=AUTH,
        seeder=RequestSeeder(0),
    )
    caplog.set_level(logging.DEBUG, logger="graphql_minimizer")
    with TestClient(create_app(gw)) as c:
        r = c.post(
            "/graphql", json={"query": "{ profiles { name } }"}, headers=bearer("r")
        )
    assert r.status_code == 500
    assert r.json() == {
        "errors": [{"message": "Internal error while minimizing the response"}]
    }
    assert "@noise failed on Profile.name for role r" in caplog.text
    assert "Johanna" not in caplog.text
    assert "Johanna" not in r.text


def test_logs_leak_nothing(client, caplog):
    caplog.set_level(logging.DEBUG, logger="graphql_minimizer")
    headers = bearer("analyst")
    token = headers["Authorization"].split()[1]
    client.post(
        "/graphql", json={"query": "{ users { name email } }"}, headers=headers
    )
    client.post("/graphql", json={"query": "{ users {"}, headers=headers)
    client.post("/graphql", json={"query": PAIN_QUERY}, headers=bearer("x", "y" * 40))
    assert caplog.records
    assert SECRET not in caplog.text
    assert token not in caplog.text
    assert "@example.org" not in caplog.text


def test_anonymous_role():
    auth = AuthConfig(SECRET, anonymous_role="analyst")
    gw = Gateway.from_config(ServiceConfig(auth=auth, dataset_users=2))
    with TestClient(create_app(gw)) as c:
        r = c.post("/graphql", json={"query": "{ users { id name } }"})
    assert r.status_code == 200
    assert r.json() == {
        "data": {
            "users": [{"id": "user-1", "name": None}, {"id": "user-2", "name": None}]
        }
    }


def test_validate_packaged_sources():
    schema, policy, diagnostics = validate_sources(
        packaged_text("tracker.graphql"),
        "tracker.graphql",
        packaged_text("tracker-policy.txt"),
        "tracker-policy.txt",
    )
    assert diagnostics == []
    assert schema is not None
    assert policy is not None


def test_startup_error(tmp_path):
    policy_path = tmp_path / "policy.txt"
    policy_path.write_text(
        "Role: r\nField: User.nickname\nDirective: noop\n", encoding="utf-8"
    )
    with pytest.raises(StartupError) as excinfo:
        Gateway.from_config(ServiceConfig(auth=AUTH, policy_path=policy_path))
    assert str(excinfo.value) == (
        f"{policy_path}:1:1: User.nickname is not defined in the schema"
    )


def test_startup_error_unparsable(tmp_path):
    schema_path = tmp_path / "schema.graphql"
    schema_path.write_text("type Query {\n  a: Nope\n}\n", encoding="utf-8")
    policy_path = tmp_path / "policy.txt"
    policy_path.write_text("Role: r\nField: A.b\nDirective: blur\n", encoding="utf-8")
    with pytest.raises(StartupError) as excinfo:
        Gateway.from_config(
            ServiceConfig(auth=AUTH, schema_path=schema_path, policy_path=policy_path)
        )
    assert [(name, str(d)) for name, d in excinfo.value.diagnostics] == [
        (str(schema_path), "2:6: unknown type 'Nope'"),
        (str(policy_path), "1:1: unknown directive 'blur'"),
    ]


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError) as excinfo:
        Gateway.from_config(
            ServiceConfig(auth=AUTH, schema_path=tmp_path / "nonexistent.graphql")
        )
    assert str(excinfo.value).startswith(
        f"cannot read {tmp_path / 'nonexistent.graphql'}: "
    )


def test_data_dir(tmp_path):
    generate_dataset(3, seed=99).dump(tmp_path)
    gw = Gateway.from_config(ServiceConfig(auth=AUTH, data_dir=tmp_path))
    assert gw.source.counts() == generate_dataset(3, seed=99).counts()
    assert [u["id"] for u in gw.source.get_records("User")] == [
        "user-1",
        "user-2",
        "user-3",
    ]
