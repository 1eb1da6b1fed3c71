"""Interned in-memory relations plus the manifest/CSV loader."""
from __future__ import annotations

import csv
import json
import os
from pathlib import Path


class DatabaseError(ValueError):
    pass


class Dictionary:
    """Two-way map between strings and dense integer ids."""

    def __init__(self):
        self.ids: dict = {}
        self.values: list = []

    def intern(self, value) -> int:
        value = str(value)
        i = self.ids.get(value)
        if i is None:
            i = len(self.values)
            self.ids[value] = i
            self.values.append(value)
        return i

    def lookup(self, value):
        return self.ids.get(str(value))

    def decode(self, i: int) -> str:
        return self.values[i]

    def __len__(self):
        return len(self.values)


class Database:
    """Relations as duplicate-free lists of int tuples, kept in insertion
    order so that enumeration order is reproducible."""

    def __init__(self, dictionary: Dictionary | None = None):
        self.dictionary = dictionary or Dictionary()
        self.relations: dict = {}
        self.arities: dict = {}

    @classmethod
    def from_rows(cls, rows: dict, arities: dict | None = None) -> "Database":
        db = cls()
        for name, tuples in rows.items():
            tuples = list(tuples)
            arity = (arities or {}).get(name)
            if arity is None:
                arity = len(tuples[0]) if tuples else None
            db.add_relation(name, arity, tuples)
        return db

    def add_relation(self, name: str, arity: int | None, tuples) -> None:
        seen = set()
        rel = []
        intern = self.dictionary.intern
        for t in tuples:
            if arity is None:
                arity = len(t)
            if len(t) != arity:
                raise DatabaseError(
                    f"relation {name}: tuple {tuple(t)} has arity {len(t)}, expected {arity}"
                )
            row = tuple(intern(v) for v in t)
            if row not in seen:
                seen.add(row)
                rel.append(row)
        self.relations[name] = rel
        self.arities[name] = arity

    def with_relations(self, extra: dict) -> "Database":
        """A copy sharing the dictionary, with already-interned relations
        added or replaced."""
        db = Database(self.dictionary)
        db.relations = dict(self.relations)
        db.arities = dict(self.arities)
        for name, rows in extra.items():
            db.relations[name] = rows
            db.arities[name] = len(rows[0]) if rows else db.arities.get(name)
        return db

    def get(self, name: str) -> list:
        return self.relations.get(name, [])

    def size(self) -> int:
        return sum(len(r) for r in self.relations.values())

    def decode(self, row) -> tuple:
        return tuple(self.dictionary.values[i] for i in row)

    def encode(self, values) -> tuple | None:
        """Interned ids for string values; None when a value is unknown."""
        out = []
        for v in values:
            i = self.dictionary.lookup(v)
            if i is None:
                return None
            out.append(i)
        return tuple(out)

    def decoded(self) -> dict:
        return {n: {self.decode(r) for r in rows} for n, rows in self.relations.items()}

    def check_schema(self, ucq) -> None:
        """Bind-time validation against the relations a query uses."""
        for name, arity in ucq.arities.items():
            if name not in self.relations:
                raise DatabaseError(f"query uses relation {name}, which the database does not declare")
            have = self.arities.get(name)
            if have is not None and have != arity:
                raise DatabaseError(
                    f"relation {name} has arity {have} in the database but {arity} in the query"
                )


def load_database(manifest_path) -> Database:
    """Load ``{"relations": [{"name", "arity", "file"}]}`` with headerless CSV
    files resolved relative to the manifest."""
    manifest_path = Path(manifest_path)
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DatabaseError(f"cannot read manifest {manifest_path}: {exc}") from exc
    entries = manifest.get("relations") if isinstance(manifest, dict) else manifest
    if not isinstance(entries, list):
        raise DatabaseError("manifest must list relations")
    db = Database()
    for entry in entries:
        try:
            name, arity, file = entry["name"], int(entry["arity"]), entry["file"]
        except (KeyError, TypeError, ValueError) as exc:
            raise DatabaseError(f"bad manifest entry {entry!r}") from exc
        path = manifest_path.parent / file
        rows = []
        try:
            with open(path, newline="", encoding="utf-8") as f:
                for lineno, row in enumerate(csv.reader(f), 1):
                    if not row:
                        continue
                    if len(row) != arity:
                        raise DatabaseError(
                            f"{path}:{lineno}: expected {arity} fields, found {len(row)}"
                        )
                    rows.append(row)
        except OSError as exc:
            raise DatabaseError(f"cannot read {path}: {exc}") from exc
        except csv.Error as exc:
            raise DatabaseError(f"{path}: malformed CSV ({exc})") from exc
        db.add_relation(name, arity, rows)
    return db


def write_database(rows: dict, out_dir, arities: dict | None = None) -> Path:
    """Write relations as CSV files plus ``manifest.json``; returns the
    manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for name in sorted(rows):
        tuples = sorted(rows[name], key=lambda t: tuple(map(str, t)))
        arity = (arities or {}).get(name) or (len(tuples[0]) if tuples else 1)
        file = f"{name}.csv"
        with open(out / file, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f, lineterminator="\n")
            for t in tuples:
                w.writerow([str(v) for v in t])
        entries.append({"name": name, "arity": arity, "file": file})
    manifest = out / "manifest.json"
    manifest.write_text(json.dumps({"relations": entries}, indent=2) + os.linesep, encoding="utf-8")
    return manifest
