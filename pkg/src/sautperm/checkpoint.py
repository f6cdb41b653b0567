"""Resumable run directory.

Layout::

    header.json        format version, rank, configuration, conventions
    ledger.json        committed entries, each with the sha256 of its payload
    p2_m<m>.jsonl      hom-class records kept after the filters
    p3_m<m>.jsonl      one shard result per line, appended
    outcome_m<m>.json  certificate for the degree

Only ledgered content counts.  Lines appended to a shard file after the
last ledger write are dropped on resume.  Any ledgered payload that is
missing or whose checksum differs is an integrity failure.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

from .errors import CheckpointError

FORMAT = "sautperm-checkpoint/1"

CONVENTIONS = {
    "points": "0-based; a permutation is stored as its image array",
    "action": "right action; p*q applies p first",
    "automorphism_product": "composition of maps, (f g)(w) = f(g(w))",
    "dprime_generators": "eps1 eps2, eps2 eps3, then 3-cycles (a1 a2 a3), (a2 a3 a4), ...",
    "alternating_generators": "3-cycles (0 1 2), (1 2 3), ...; the first n-2 generate A_n",
    "signed_points": "point 2k is a_(k+1), point 2k+1 is its inverse",
}


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class Interrupted(Exception):
    """Raised by the test hook that stops a run after a number of commits."""


class Checkpoint:
    def __init__(self, root: Path, stop_after: int | None = None):
        self.root = Path(root)
        self.entries: list[dict] = []
        self.stop_after = stop_after
        self._commits = 0

    # -- creation and loading ----------------------------------------------

    @classmethod
    def create(cls, root: Path, header: dict, stop_after: int | None = None) -> Checkpoint:
        root = Path(root)
        root.mkdir(parents=True, exist_ok=True)
        ck = cls(root, stop_after)
        hp = root / "header.json"
        if hp.exists():
            existing = ck.read_header()
            if existing != header:
                raise CheckpointError("checkpoint directory holds a different run", hp)
            ck.load_ledger()
            return ck
        atomic_write(hp, json.dumps(header, sort_keys=True, indent=2) + "\n")
        atomic_write(root / "ledger.json", dumps({"format": FORMAT, "entries": []}) + "\n")
        return ck

    @classmethod
    def open(cls, root: Path, stop_after: int | None = None) -> Checkpoint:
        ck = cls(root, stop_after)
        ck.read_header()
        ck.load_ledger()
        return ck

    def read_header(self) -> dict:
        hp = self.root / "header.json"
        try:
            header = json.loads(hp.read_text())
        except FileNotFoundError:
            raise CheckpointError("missing header", hp) from None
        except json.JSONDecodeError as e:
            raise CheckpointError(f"unreadable header: {e}", hp) from None
        if header.get("format") != FORMAT:
            raise CheckpointError(f"unsupported checkpoint format {header.get('format')!r}", hp)
        return header

    def load_ledger(self) -> None:
        lp = self.root / "ledger.json"
        try:
            data = json.loads(lp.read_text())
            entries = data["entries"]
            if data.get("format") != FORMAT or not isinstance(entries, list):
                raise ValueError("bad ledger")
        except FileNotFoundError:
            raise CheckpointError("missing ledger", lp) from None
        except (ValueError, KeyError, TypeError) as e:
            raise CheckpointError(f"corrupt ledger: {e}", lp) from None
        self.entries = entries
        self._validate()

    def _validate(self) -> None:
        shard_lines: dict[str, list[str]] = {}
        for e in self.entries:
            path = self.root / e["file"]
            if e["kind"] == "shard":
                if e["file"] not in shard_lines:
                    try:
                        shard_lines[e["file"]] = path.read_text().splitlines()
                    except FileNotFoundError:
                        raise CheckpointError("ledgered shard file is missing", path) from None
                lines = shard_lines[e["file"]]
                if e["line"] >= len(lines) or sha256(lines[e["line"]]) != e["sha256"]:
                    raise CheckpointError(f"shard record {e['line']} fails its checksum", path)
            else:
                try:
                    text = path.read_text()
                except FileNotFoundError:
                    raise CheckpointError("ledgered file is missing", path) from None
                if sha256(text) != e["sha256"]:
                    raise CheckpointError("file fails its checksum", path)
        # drop shard lines written after the last ledger commit
        for path in sorted(self.root.glob("p3_m*.jsonl")):
            name = path.name
            lines = shard_lines.get(name) or path.read_text().splitlines()
            kept = max((e["line"] + 1 for e in self.entries if e["file"] == name), default=0)
            if kept < len(lines):
                atomic_write(self.root / name, "".join(l + "\n" for l in lines[:kept]))

    # -- commits -------------------------------------------------------------

    def _commit(self, entry: dict) -> None:
        self.entries.append(entry)
        atomic_write(self.root / "ledger.json", dumps({"format": FORMAT, "entries": self.entries}) + "\n")
        self._commits += 1
        if self.stop_after is not None and self._commits >= self.stop_after:
            raise Interrupted(f"stopped after {self._commits} commits")

    def put_file(self, kind: str, name: str, text: str, **key) -> None:
        atomic_write(self.root / name, text)
        self._commit({"kind": kind, "file": name, "sha256": sha256(text), **key})

    def append_shard(self, name: str, record: dict, **key) -> None:
        line = dumps(record)
        count = sum(1 for e in self.entries if e["kind"] == "shard" and e["file"] == name)
        # unledgered tails were trimmed on open, so the file has exactly `count` lines
        with open(self.root / name, "a") as fh:
            fh.write(line + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        self._commit({"kind": "shard", "file": name, "line": count, "sha256": sha256(line), **key})

    # -- lookups -------------------------------------------------------------

    def find(self, kind: str, **key) -> dict | None:
        for e in self.entries:
            if e["kind"] == kind and all(e.get(k) == v for k, v in key.items()):
                return e
        return None

    def read(self, entry: dict) -> str:
        return (self.root / entry["file"]).read_text()

    def shard_records(self, m: int) -> list[dict]:
        name = f"p3_m{m}.jsonl"
        path = self.root / name
        if not path.exists():
            return []
        lines = path.read_text().splitlines()
        return [json.loads(lines[e["line"]]) for e in self.entries if e["kind"] == "shard" and e["file"] == name]
