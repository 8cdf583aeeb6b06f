import abc
import json
import logging
from pathlib import Path
import jsonschema
from . import errors
from .util import format_datetime, parse_datetime

log = logging.getLogger(__name__)

LINKS_FILE = "links.jsonl"

#: Schema for each line of a ``<Type>.jsonl`` file
RECORD_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["id"],
    "properties": {"id": {"type": "string", "minLength": 1}},
}

#: Schema for each line of :file:`links.jsonl`
LINK_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["type", "field", "from", "to"],
    "additionalProperties": False,
    "properties": {
        "type": {"type": "string"},
        "field": {"type": "string"},
        "from": {"type": "string"},
        "to": {"type": "array", "items": {"type": "string"}},
    },
}


class DataSource(abc.ABC):
    """
    The store that resolvers read from.  Records of an object type are
    `dict`\\s keyed by field name with at least an ``"id"`` key; relations
    between records are kept in link tables keyed by the owning type and
    field.
    """

    @abc.abstractmethod
    def get_records(self, type_name):
        """
        Returns the records of type ``type_name`` in their stable insertion
        order.  Unknown types have no records.

        :rtype: List[dict]
        """
        ...

    @abc.abstractmethod
    def get_linked(self, type_name, field_name, record_id):
        """
        Returns the records linked to the record ``record_id`` of type
        ``type_name`` through the relation field ``field_name``, in link order

        :rtype: List[dict]
        """
        ...


class MemoryDataSource(DataSource):
    def __init__(self):
        #: Mapping from type names to mappings from IDs to records
        self.tables = {}
        #: Mapping from ``(type_name, field_name)`` to mappings from IDs to
        #: lists of linked IDs
        self.links = {}
        #: Mapping from ``(type_name, field_name)`` to the linked type's name
        self.link_targets = {}

    def add_record(self, type_name, record):
        table = self.tables.setdefault(type_name, {})
        if record["id"] in table:
            raise errors.DataIntegrityError(
                f"duplicate {type_name} record {record['id']!r}"
            )
        table[record["id"]] = record

    def add_link(self, type_name, field_name, target_type, from_id, to_id):
        key = (type_name, field_name)
        if self.link_targets.setdefault(key, target_type) != target_type:
            raise errors.DataIntegrityError(
                f"{type_name}.{field_name} links to both"
                f" {self.link_targets[key]} and {target_type}"
            )
        self.links.setdefault(key, {}).setdefault(from_id, []).append(to_id)

    def get_records(self, type_name):
        return list(self.tables.get(type_name, {}).values())

    def get_linked(self, type_name, field_name, record_id):
        key = (type_name, field_name)
        ids = self.links.get(key, {}).get(record_id, [])
        if not ids:
            return []
        table = self.tables[self.link_targets[key]]
        return [table[i] for i in ids]

    def counts(self):
        return {type_name: len(table) for type_name, table in self.tables.items()}

    def check_integrity(self):
        """
        :raises DataIntegrityError: if a link starts or ends at a record that
            does not exist
        """
        for (type_name, field_name), links in self.links.items():
            target_type = self.link_targets[(type_name, field_name)]
            sources = self.tables.get(type_name, {})
            targets = self.tables.get(target_type, {})
            for from_id, to_ids in links.items():
                if from_id not in sources:
                    raise errors.DataIntegrityError(
                        f"{type_name}.{field_name} link from missing record {from_id!r}"
                    )
                for to_id in to_ids:
                    if to_id not in targets:
                        raise errors.DataIntegrityError(
                            f"{type_name}.{field_name} link to missing"
                            f" {target_type} record {to_id!r}"
                        )

    def dump(self, path):
        """
        Write the store to the directory ``path`` as one ``<Type>.jsonl`` file
        per type plus :file:`links.jsonl`
        """
        path = Path(path)
        path.mkdir(parents=True, exist_ok=True)
        for type_name, table in self.tables.items():
            with (path / f"{type_name}.jsonl").open("w", encoding="utf-8") as fp:
                for record in table.values():
                    print(json.dumps(record, default=format_datetime), file=fp)
        with (path / LINKS_FILE).open("w", encoding="utf-8") as fp:
            for (type_name, field_name), links in self.links.items():
                for from_id, to_ids in links.items():
                    line = {
                        "type": type_name,
                        "field": field_name,
                        "from": from_id,
                        "to": to_ids,
                    }
                    print(json.dumps(line), file=fp)

    @classmethod
    def load(cls, path, schema):
        """
        Load a store written by `dump()`.  ``schema`` determines which record
        fields hold dates and which type each relation links to.
        """
        path = Path(path)
        source = cls()
        for type_name, otype in schema.types.items():
            date_fields = [
                name
                for name, fdef in otype.fields.items()
                if fdef.type_ref.name == "Date"
            ]
            for record in _read_jsonl(path / f"{type_name}.jsonl", RECORD_SCHEMA):
                for name in date_fields:
                    if record.get(name) is not None:
                        record[name] = parse_datetime(record[name])
                source.add_record(type_name, record)
        for link in _read_jsonl(path / LINKS_FILE, LINK_SCHEMA):
            fdef = schema.get_field(link["type"], link["field"])
            if fdef is None or fdef.type_ref.is_scalar:
                raise errors.DataIntegrityError(
                    f"{LINKS_FILE}: {link['type']}.{link['field']} is not a"
                    " relation field"
                )
            for to_id in link["to"]:
                source.add_link(
                    link["type"], link["field"], fdef.type_ref.name, link["from"], to_id
                )
        source.check_integrity()
        log.info("Loaded data source from %s: %s", path, source.counts())
        return source


def _read_jsonl(filepath, jschema):
    if not filepath.exists():
        return
    with filepath.open(encoding="utf-8") as fp:
        for lineno, line in enumerate(fp, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                jsonschema.validate(obj, jschema)
            except (ValueError, jsonschema.ValidationError) as e:
                msg = e.message if isinstance(e, jsonschema.ValidationError) else str(e)
                raise errors.DataIntegrityError(f"{filepath.name}:{lineno}: {msg}")
            yield obj
