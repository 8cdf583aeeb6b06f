from datetime import datetime, timezone
from click.testing import CliRunner
from graphql_minimizer import __version__
from graphql_minimizer.__main__ import main
from graphql_minimizer.auth import extract_role
from graphql_minimizer.datasource import LINKS_FILE
from graphql_minimizer.service import SECRET_ENVVAR
from testing_lib import AUTH, SECRET


def test_version():
    r = CliRunner().invoke(main, ["--version"])
    assert r.exit_code == 0
    assert r.output.strip().endswith(__version__)


def test_check_packaged():
    r = CliRunner().invoke(main, ["check"])
    assert r.exit_code == 0, r.output
    assert r.output == ""


def test_check_bad_policy(tmp_path):
    policy = tmp_path / "policy.txt"
    policy.write_text(
        "Role: r\nField: User.nickname\nDirective: noop\n\n"
        "Role: r\nField: Profile.age\nDirective: generalize\nVisible-Count: 2\n",
        encoding="utf-8",
    )
    r = CliRunner().invoke(main, ["check", "--policy", str(policy)])
    assert r.exit_code == 1
    assert r.output.splitlines() == [
        f"{policy}:1:1: User.nickname is not defined in the schema",
        f"{policy}:5:1: Profile.age: generalizing Int requires step",
    ]


def test_token():
    r = CliRunner().invoke(main, ["token", "--role", "analyst", "--jwt-secret", SECRET])
    assert r.exit_code == 0, r.output
    now = datetime.now(timezone.utc)
    assert extract_role(r.output.strip(), AUTH, now) == "analyst"


def test_token_secret_from_env():
    r = CliRunner().invoke(
        main, ["token", "--role", "admin"], env={SECRET_ENVVAR: SECRET}
    )
    assert r.exit_code == 0, r.output
    now = datetime.now(timezone.utc)
    assert extract_role(r.output.strip(), AUTH, now) == "admin"


def test_token_short_secret():
    r = CliRunner().invoke(main, ["token", "--role", "admin", "--jwt-secret", "abc"])
    assert r.exit_code == 1
    assert "hmac_secret must be at least 32 bytes long" in r.output


def test_token_no_secret():
    r = CliRunner().invoke(
        main, ["token", "--role", "admin"], env={SECRET_ENVVAR: None}
    )
    assert r.exit_code == 2


def test_gen(tmp_path):
    out = tmp_path / "data"
    r = CliRunner().invoke(
        main, ["gen", "--users", "3", "--seed", "1", "--out", str(out)]
    )
    assert r.exit_code == 0, r.output
    assert r.output.splitlines()[:2] == ["User: 3", "Profile: 3"]
    assert (out / "User.jsonl").exists()
    assert (out / LINKS_FILE).exists()


def test_serve_bad_listen():
    r = CliRunner().invoke(
        main, ["serve", "--listen", "localhost", "--jwt-secret", SECRET]
    )
    assert r.exit_code == 2
    assert "must be of the form HOST:PORT" in r.output


def test_serve_invalid_policy(tmp_path):
    policy = tmp_path / "policy.txt"
    policy.write_text("Role: r\nField: A.b\nDirective: blur\n", encoding="utf-8")
    r = CliRunner().invoke(
        main, ["serve", "--policy", str(policy), "--jwt-secret", SECRET]
    )
    assert r.exit_code == 1
    assert f"{policy}:1:1: unknown directive 'blur'" in r.output
    assert "startup validation failed" in r.output
