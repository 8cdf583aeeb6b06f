from datetime import datetime, timezone
import pytest
from graphql_minimizer.dataset import generate_dataset
from graphql_minimizer.datasource import LINKS_FILE, MemoryDataSource
from graphql_minimizer.errors import DataIntegrityError
from testing_lib import tracker_schema


def small_source():
    source = MemoryDataSource()
    source.add_record("User", {"id": "u1", "name": "Dana"})
    source.add_record("User", {"id": "u2", "name": "Elif"})
    source.add_record("Profile", {"id": "p1", "age": 30})
    source.add_link("User", "profile", "Profile", "u1", "p1")
    source.add_link("Profile", "user", "User", "p1", "u1")
    return source


def test_get_records_and_links():
    source = small_source()
    assert [r["id"] for r in source.get_records("User")] == ["u1", "u2"]
    assert source.get_records("Cycle") == []
    assert source.get_linked("User", "profile", "u1") == [{"id": "p1", "age": 30}]
    assert source.get_linked("User", "profile", "u2") == []
    assert source.get_linked("User", "cycles", "u1") == []
    assert source.counts() == {"User": 2, "Profile": 1}
    source.check_integrity()


def test_duplicate_record():
    source = small_source()
    with pytest.raises(DataIntegrityError) as excinfo:
        source.add_record("User", {"id": "u1"})
    assert str(excinfo.value) == "duplicate User record 'u1'"


def test_conflicting_link_target():
    source = small_source()
    with pytest.raises(DataIntegrityError) as excinfo:
        source.add_link("User", "profile", "Cycle", "u2", "c1")
    assert str(excinfo.value) == "User.profile links to both Profile and Cycle"


@pytest.mark.parametrize(
    "from_id,to_id,message",
    [
        ("u9", "p1", "User.profile link from missing record 'u9'"),
        ("u2", "p9", "User.profile link to missing Profile record 'p9'"),
    ],
)
def test_dangling_link(from_id, to_id, message):
    source = small_source()
    source.add_link("User", "profile", "Profile", from_id, to_id)
    with pytest.raises(DataIntegrityError) as excinfo:
        source.check_integrity()
    assert str(excinfo.value) == message


def test_dump_load(tmp_path):
    source = generate_dataset(5, seed=1)
    source.dump(tmp_path)
    assert sorted(p.name for p in tmp_path.iterdir()) == [
        "Cycle.jsonl",
        "Profile.jsonl",
        "Symptom.jsonl",
        "User.jsonl",
        LINKS_FILE,
    ]
    loaded = MemoryDataSource.load(tmp_path, tracker_schema())
    assert loaded.counts() == source.counts()
    for type_name in ("User", "Profile", "Cycle", "Symptom"):
        assert loaded.get_records(type_name) == source.get_records(type_name)
    assert loaded.links == source.links
    assert loaded.link_targets == source.link_targets
    birth_date = loaded.get_records("User")[0]["birthDate"]
    assert isinstance(birth_date, datetime)
    assert birth_date.tzinfo == timezone.utc


def test_load_empty_dir(tmp_path):
    loaded = MemoryDataSource.load(tmp_path, tracker_schema())
    assert loaded.counts() == {}
    assert loaded.get_records("User") == []


@pytest.mark.parametrize(
    "files,message",
    [
        (
            {"User.jsonl": '{"id": "u1"}\n{"name": "x"}\n'},
            "User.jsonl:2: 'id' is a required property",
        ),
        (
            {"User.jsonl": '{"id": "u1"}\n{"id": "u1"}\n'},
            "duplicate User record 'u1'",
        ),
        (
            {
                "User.jsonl": '{"id": "u1"}\n',
                LINKS_FILE: '{"type": "User", "field": "name", "from": "u1",'
                ' "to": ["u1"]}\n',
            },
            f"{LINKS_FILE}: User.name is not a relation field",
        ),
        (
            {
                "User.jsonl": '{"id": "u1"}\n',
                LINKS_FILE: '{"type": "User", "field": "profile", "from": "u1",'
                ' "to": ["p1"]}\n',
            },
            "User.profile link to missing Profile record 'p1'",
        ),
        (
            {
                "User.jsonl": '{"id": "u1"}\n',
                LINKS_FILE: '{"type": "User", "field": "profile", "from": "u1",'
                ' "to": "p1"}\n',
            },
            f"{LINKS_FILE}:1: 'p1' is not of type 'array'",
        ),
    ],
)
def test_load_bad_data(tmp_path, files, message):
    for name, text in files.items():
        (tmp_path / name).write_text(text, encoding="utf-8")
    with pytest.raises(DataIntegrityError) as excinfo:
        MemoryDataSource.load(tmp_path, tracker_schema())
    assert str(excinfo.value) == message


def test_load_malformed_json(tmp_path):
    (tmp_path / "Cycle.jsonl").write_text('{"id": "c1"}\n{"id": \n', encoding="utf-8")
    with pytest.raises(DataIntegrityError) as excinfo:
        MemoryDataSource.load(tmp_path, tracker_schema())
    assert str(excinfo.value).startswith("Cycle.jsonl:2: ")
