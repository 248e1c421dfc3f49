"""Artifact files: one JSON header line, then the payload, written atomically.

The header records the artifact kind, a format version, the seed and a
hash of the run configuration. Its ``created`` field is the only part that
changes between otherwise identical runs; ``without_timestamp`` drops it
for comparisons.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Mapping

from .errors import SchemaError

FORMAT = "newsvol"
VERSION = 1
TIMESTAMP_FIELD = "created"


def config_hash(config: Mapping[str, Any]) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def make_header(kind: str, config: Mapping[str, Any], seed: int, **extra: Any) -> dict:
    header = {
        "format": FORMAT,
        "kind": kind,
        "version": VERSION,
        "seed": seed,
        "config_hash": config_hash(config),
    }
    header.update(extra)
    header[TIMESTAMP_FIELD] = dt.datetime.now(dt.timezone.utc).replace(microsecond=0).isoformat()
    return header


def _umask() -> int:
    mask = os.umask(0)
    os.umask(mask)
    return mask


def atomic_write(path: str | Path, text: str) -> None:
    """Write ``text`` to a temp file in the target directory, then rename it
    over ``path`` so readers never see a partial file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        os.chmod(tmp, 0o666 & ~_umask())
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump(obj: Any) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def write_artifact(path: str | Path, header: Mapping[str, Any], lines: Iterable[str]) -> None:
    body = "".join(line + "\n" for line in lines)
    atomic_write(path, _dump(header) + "\n" + body)


def write_jsonl(path: str | Path, header: Mapping[str, Any], rows: Iterable[Any]) -> None:
    write_artifact(path, header, (_dump(r) for r in rows))


def read_artifact(path: str | Path, kind: str | None = None) -> tuple[dict, list[str]]:
    """Return ``(header, payload lines)``; checks the header's kind if given."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise SchemaError(f"{path}: missing; run the earlier pipeline step first") from None
    lines = text.split("\n")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError:
        raise SchemaError(f"{path}: first line is not a JSON header") from None
    if not isinstance(header, dict) or header.get("format") != FORMAT:
        raise SchemaError(f"{path}: not a {FORMAT} artifact")
    if kind is not None and header.get("kind") != kind:
        raise SchemaError(f"{path}: expected a {kind!r} artifact, found {header.get('kind')!r}")
    body = lines[1:]
    if body and body[-1] == "":
        body.pop()
    return header, body


def read_jsonl(path: str | Path, kind: str | None = None) -> tuple[dict, list[Any]]:
    header, lines = read_artifact(path, kind)
    try:
        return header, [json.loads(line) for line in lines if line]
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: malformed JSON line ({exc})") from None


def without_timestamp(text: str) -> str:
    """The artifact text with the header's timestamp removed."""
    first, sep, rest = text.partition("\n")
    header = json.loads(first)
    header.pop(TIMESTAMP_FIELD, None)
    return _dump(header) + sep + rest
