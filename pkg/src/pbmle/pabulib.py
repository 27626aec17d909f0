"""Reader and writer for pabulib ``.pb`` files (approval votes only).

A file has three sections, each introduced by its name on a line of its own
and followed by a semicolon-separated header row::

    META
    key;value
    num_projects;2
    num_votes;1
    budget;2
    vote_type;approval
    PROJECTS
    project_id;cost
    p1;1
    p2;1
    VOTES
    voter_id;vote
    v1;p1,p2

Every malformed input raises :class:`PbParseError` carrying a diagnostic
code and a 1-based line/column position.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .errors import PBError
from .model import Instance, Profile, Project

SECTIONS = ("META", "PROJECTS", "VOTES")
REQUIRED_META = ("num_projects", "num_votes", "budget", "vote_type")


class PbParseError(PBError, ValueError):
    """A ``.pb`` document could not be parsed.

    Attributes
    ----------
    code : str
        Machine-readable diagnostic kind, e.g. ``"dangling-reference"``.
    line, column : int
        1-based position of the offending token (0 when not applicable).
    """

    def __init__(self, code: str, message: str, line: int = 0, column: int = 0):
        self.code = code
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: [{code}] {message}")

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "line": self.line, "column": self.column}


@dataclass
class PbProject:
    id: str
    cost: int
    extras: dict[str, str] = field(default_factory=dict)


@dataclass
class PbVote:
    voter_id: str
    approved: tuple[str, ...]
    extras: dict[str, str] = field(default_factory=dict)


@dataclass
class PbFile:
    meta: dict[str, str]
    projects: list[PbProject]
    votes: list[PbVote]

    @property
    def budget(self) -> int:
        return int(self.meta["budget"])


@dataclass
class _Row:
    line: int
    fields: list[str]
    columns: list[int]


def _split(text: str, lineno: int) -> _Row:
    try:
        fields = next(csv.reader([text], delimiter=";"))
    except (csv.Error, StopIteration) as exc:
        raise PbParseError("malformed-row", f"cannot split row: {exc}", lineno, 1) from None
    columns, pos = [], 0
    for f in fields:
        found = text.find(f, pos)
        start = found if found >= 0 else pos
        columns.append(start + 1)
        pos = start + len(f)
    return _Row(lineno, [f.strip() for f in fields], columns)


def _integer(value: str, what: str, line: int, column: int) -> int:
    try:
        number = int(value)
    except ValueError:
        raise PbParseError("invalid-integer", f"{what} must be an integer, got {value!r}", line, column) from None
    return number


def _sections(text: str) -> dict[str, tuple[int, list[_Row]]]:
    sections: dict[str, tuple[int, list[_Row]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        if stripped.upper() in SECTIONS and ";" not in stripped:
            name = stripped.upper()
            if name in sections:
                raise PbParseError("duplicate-section", f"section {name} appears twice", lineno, 1)
            sections[name] = (lineno, [])
            current = name
            continue
        if current is None:
            raise PbParseError("missing-section", "content before the first section header", lineno, 1)
        sections[current][1].append(_split(raw, lineno))
    for name in SECTIONS:
        if name not in sections:
            raise PbParseError("missing-section", f"no {name} section", 0, 0)
    return sections


def _header(name: str, start: int, rows: list[_Row], required: tuple[str, ...]) -> tuple[list[str], list[_Row]]:
    if not rows:
        raise PbParseError("missing-header", f"section {name} has no header row", start, 1)
    header = [h.lower() for h in rows[0].fields]
    for col in required:
        if col not in header:
            raise PbParseError("missing-column", f"section {name} lacks column {col!r}", rows[0].line, 1)
    if len(set(header)) != len(header):
        raise PbParseError("duplicate-column", f"section {name} repeats a column", rows[0].line, 1)
    return header, rows[1:]


def _record(header: list[str], row: _Row, name: str) -> dict[str, tuple[str, int]]:
    if len(row.fields) > len(header):
        raise PbParseError(
            "malformed-row",
            f"{name} row has {len(row.fields)} fields but the header has {len(header)}",
            row.line,
            row.columns[len(header)],
        )
    end = row.columns[-1] + len(row.fields[-1]) if row.fields else 1
    out = {}
    for i, col in enumerate(header):
        if i < len(row.fields):
            out[col] = (row.fields[i], row.columns[i])
        else:
            out[col] = ("", end)
    return out


def parse_pb(data: str | bytes) -> PbFile:
    """Parse a ``.pb`` document; raises PbParseError with a diagnostic on any defect."""
    if isinstance(data, (bytes, bytearray)):
        try:
            data = bytes(data).decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise PbParseError("encoding", f"not valid UTF-8: {exc.reason} at byte {exc.start}", 1, 1) from None
    if not isinstance(data, str):
        raise PbParseError("encoding", f"expected text or bytes, got {type(data).__name__}")
    if "\x00" in data:
        line = data[: data.index("\x00")].count("\n") + 1
        raise PbParseError("malformed-row", "NUL character in input", line, 1)
    data = data.lstrip("﻿")
    sections = _sections(data)

    start, rows = sections["META"]
    header, rows = _header("META", start, rows, ("key", "value"))
    meta: dict[str, str] = {}
    meta_pos: dict[str, tuple[int, int]] = {}
    for row in rows:
        rec = _record(header, row, "META")
        key, kcol = rec["key"]
        value, vcol = rec["value"]
        if not key:
            raise PbParseError("malformed-row", "empty META key", row.line, kcol)
        if key in meta:
            raise PbParseError("duplicate-id", f"META key {key!r} repeated", row.line, kcol)
        meta[key] = value
        meta_pos[key] = (row.line, vcol)
    for key in REQUIRED_META:
        if key not in meta:
            raise PbParseError("missing-meta-key", f"META lacks {key!r}", start, 1)
    if meta["vote_type"].lower() != "approval":
        line, col = meta_pos["vote_type"]
        raise PbParseError("unsupported-vote-type", f"vote_type {meta['vote_type']!r} is not 'approval'", line, col)
    budget = _integer(meta["budget"], "budget", *meta_pos["budget"])
    if budget < 1:
        raise PbParseError("invalid-integer", f"budget must be >= 1, got {budget}", *meta_pos["budget"])
    num_projects = _integer(meta["num_projects"], "num_projects", *meta_pos["num_projects"])
    num_votes = _integer(meta["num_votes"], "num_votes", *meta_pos["num_votes"])

    start, rows = sections["PROJECTS"]
    header, rows = _header("PROJECTS", start, rows, ("project_id", "cost"))
    projects: list[PbProject] = []
    known: set[str] = set()
    for row in rows:
        rec = _record(header, row, "PROJECTS")
        pid, pcol = rec["project_id"]
        if not pid:
            raise PbParseError("malformed-row", "empty project_id", row.line, pcol)
        if pid in known:
            raise PbParseError("duplicate-id", f"project {pid!r} defined twice", row.line, pcol)
        cost_text, ccol = rec["cost"]
        cost = _integer(cost_text, f"cost of {pid!r}", row.line, ccol)
        if cost < 1:
            raise PbParseError("invalid-cost", f"cost of {pid!r} must be >= 1, got {cost}", row.line, ccol)
        known.add(pid)
        extras = {k: v for k, (v, _) in rec.items() if k not in ("project_id", "cost")}
        projects.append(PbProject(pid, cost, extras))
    if len(projects) != num_projects:
        raise PbParseError(
            "count-mismatch",
            f"num_projects is {num_projects} but {len(projects)} projects are listed",
            *meta_pos["num_projects"],
        )
    if not projects:
        raise PbParseError("count-mismatch", "an instance needs at least one project", start, 1)

    start, rows = sections["VOTES"]
    header, rows = _header("VOTES", start, rows, ("voter_id", "vote"))
    votes: list[PbVote] = []
    voters: set[str] = set()
    for row in rows:
        rec = _record(header, row, "VOTES")
        vid, vcol = rec["voter_id"]
        if not vid:
            raise PbParseError("malformed-row", "empty voter_id", row.line, vcol)
        if vid in voters:
            raise PbParseError("duplicate-id", f"voter {vid!r} appears twice", row.line, vcol)
        voters.add(vid)
        vote_text, col = rec["vote"]
        approved: list[str] = []
        offset = 0
        for item in vote_text.split(",") if vote_text else []:
            pos = col + offset
            offset += len(item) + 1
            item = item.strip()
            if not item:
                raise PbParseError("malformed-row", f"empty project id in vote of {vid!r}", row.line, pos)
            if item not in known:
                raise PbParseError("dangling-reference", f"vote of {vid!r} names unknown project {item!r}", row.line, pos)
            if item in approved:
                raise PbParseError("duplicate-id", f"vote of {vid!r} lists {item!r} twice", row.line, pos)
            approved.append(item)
        extras = {k: v for k, (v, _) in rec.items() if k not in ("voter_id", "vote")}
        votes.append(PbVote(vid, tuple(approved), extras))
    if len(votes) != num_votes:
        raise PbParseError(
            "count-mismatch",
            f"num_votes is {num_votes} but {len(votes)} votes are listed",
            *meta_pos["num_votes"],
        )
    return PbFile(meta, projects, votes)


def to_instance_profile(pb: PbFile) -> tuple[Instance, Profile]:
    """Instance in file project order and profile in file voter order."""
    inst = Instance(tuple(Project(p.id, p.cost) for p in pb.projects), pb.budget)
    prof = Profile(tuple(frozenset(v.approved) for v in pb.votes))
    return inst, prof


def read_pb(path) -> tuple[Instance, Profile]:
    with open(path, "rb") as fh:
        return to_instance_profile(parse_pb(fh.read()))


def _check_writable(token: str, what: str) -> None:
    if not token or token != token.strip() or any(ch in token for ch in ";,\n\r\"") or token.upper() in SECTIONS:
        raise ValueError(f"{what} {token!r} cannot be written to a .pb file")


def write_pb(inst: Instance, prof: Profile, meta: dict[str, str] | None = None) -> str:
    """Canonical ``.pb`` text for ``(inst, prof)``.

    Required META keys are computed and written first; other entries of
    ``meta`` follow in their given order. Voters are numbered from 1.
    """
    extra = dict(meta or {})
    if extra.get("vote_type", "approval").lower() != "approval":
        raise ValueError("only approval votes can be written")
    for key in REQUIRED_META:
        extra.pop(key, None)
    for p in inst.ids:
        _check_writable(p, "project id")
    prof.validate(inst)

    buf = io.StringIO()
    out = csv.writer(buf, delimiter=";", lineterminator="\n")
    buf.write("META\n")
    out.writerow(["key", "value"])
    out.writerow(["num_projects", len(inst)])
    out.writerow(["num_votes", len(prof)])
    out.writerow(["budget", inst.budget])
    out.writerow(["vote_type", "approval"])
    for key, value in extra.items():
        _check_writable(str(key), "META key")
        out.writerow([key, " ".join(str(value).split())])
    buf.write("PROJECTS\n")
    out.writerow(["project_id", "cost"])
    for p in inst.projects:
        out.writerow([p.id, p.cost])
    buf.write("VOTES\n")
    out.writerow(["voter_id", "vote"])
    for i, ballot in enumerate(prof.ballots, start=1):
        out.writerow([i, ",".join(inst.ordered(ballot))])
    return buf.getvalue()


def canonicalize(data: str | bytes) -> str:
    """Re-emit a document in canonical form, keeping non-required META entries."""
    pb = parse_pb(data)
    inst, prof = to_instance_profile(pb)
    return write_pb(inst, prof, {k: v for k, v in pb.meta.items() if k not in REQUIRED_META})
