"""XML authority policies: parsing, evaluation, and promotion updates.

Each employee has one policy document recording the authority they currently
hold (name, id, designation, signing limit).  The database maps employee ids
to documents; on disk it is simply a directory with one ``<id>.xml`` file per
record.  Authorization is a short-circuit predicate chain over a request, and
a promotion rewrites the record's designation and signing limit.

Database values are immutable: every update returns a new database, so any
number of readers can keep evaluating against the snapshot they hold while a
single writer produces the next state.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, replace
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import (
    NotFoundError,
    PolicyParseError,
    PolicySchemaError,
    PolicyValueError,
    ValidationError,
)
from .pipeline import PipelineModel, authority_grant
from .simulate import PromotionEvent

_ROOT_TAG = "Policy"
_USER_TAG = "user"
_TEXT_FIELDS = ("name", "designation")
_INT_FIELDS = ("id", "signing_limit")

REASON_ALLOWED = "all predicates satisfied"


@dataclass(frozen=True)
class PolicyDocument:
    """One employee's current authority record."""

    name: str
    id: int
    designation: str
    signing_limit: int

    def __post_init__(self):
        if not isinstance(self.id, int) or self.id < 0:
            raise ValidationError(f"employee id must be an integer >= 0, got {self.id!r}")
        if not isinstance(self.signing_limit, int) or self.signing_limit < 0:
            raise ValidationError(
                f"signing limit must be an integer >= 0, got {self.signing_limit!r}"
            )


@dataclass(frozen=True)
class AuthorityDatabase:
    """Immutable mapping from employee id to policy document."""

    records: Mapping[int, PolicyDocument]

    def __post_init__(self):
        snapshot = dict(self.records)
        for key, doc in snapshot.items():
            if key != doc.id:
                raise ValidationError(f"record key {key} does not match document id {doc.id}")
        object.__setattr__(self, "records", MappingProxyType(snapshot))

    @classmethod
    def empty(cls) -> "AuthorityDatabase":
        return cls(records={})

    @classmethod
    def of(cls, documents: Iterable[PolicyDocument]) -> "AuthorityDatabase":
        records: dict[int, PolicyDocument] = {}
        for doc in documents:
            if doc.id in records:
                raise ValidationError(f"duplicate employee id {doc.id}")
            records[doc.id] = doc
        return cls(records=records)

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, employee_id: int) -> bool:
        return employee_id in self.records


@dataclass(frozen=True)
class AuthorizationRequest:
    """A claim of authority: who is exercising it and for what amount."""

    name: str
    id: int
    designation: str
    amount: int

    def __post_init__(self):
        if not isinstance(self.amount, int) or self.amount < 0:
            raise ValidationError(f"amount must be an integer >= 0, got {self.amount!r}")


@dataclass(frozen=True)
class Decision:
    """Outcome of an authorization check.

    ``reason`` names the first failed predicate, or is exactly
    ``REASON_ALLOWED`` when the request passed every check.
    """

    allowed: bool
    reason: str

    def __post_init__(self):
        if self.allowed != (self.reason == REASON_ALLOWED):
            raise ValidationError(
                f"inconsistent decision: allowed={self.allowed} with reason {self.reason!r}"
            )


def parse_policy(document_text: str) -> PolicyDocument:
    """Parse one policy document from XML text.

    The expected structure is ``Policy/user`` with child elements ``name``,
    ``id``, ``designation`` and ``signing_limit`` in any order; surrounding
    whitespace in text content is ignored.
    """
    try:
        root = ET.fromstring(document_text)
    except ET.ParseError as exc:
        line, column = exc.position
        raise PolicyParseError(exc.msg, line, column) from exc
    if root.tag != _ROOT_TAG:
        raise PolicySchemaError(_ROOT_TAG)
    user = root.find(_USER_TAG)
    if user is None:
        raise PolicySchemaError(_USER_TAG)
    values: dict[str, str] = {}
    for field in _TEXT_FIELDS + _INT_FIELDS:
        element = user.find(field)
        if element is None:
            raise PolicySchemaError(field)
        values[field] = (element.text or "").strip()
    numbers: dict[str, int] = {}
    for field in _INT_FIELDS:
        try:
            numbers[field] = int(values[field], 10)
        except ValueError:
            raise PolicyValueError(
                f"element '{field}' must be a base-10 integer, got {values[field]!r}"
            ) from None
    return PolicyDocument(
        name=values["name"],
        id=numbers["id"],
        designation=values["designation"],
        signing_limit=numbers["signing_limit"],
    )


def serialize_policy(doc: PolicyDocument) -> str:
    """Render a policy document back to XML text; inverse of parse_policy."""
    root = ET.Element(_ROOT_TAG)
    user = ET.SubElement(root, _USER_TAG)
    ET.SubElement(user, "name").text = doc.name
    ET.SubElement(user, "id").text = str(doc.id)
    ET.SubElement(user, "designation").text = doc.designation
    ET.SubElement(user, "signing_limit").text = str(doc.signing_limit)
    ET.indent(root)
    return ET.tostring(root, encoding="unicode") + "\n"


def evaluate(db: AuthorityDatabase, request: AuthorizationRequest) -> Decision:
    """Check a request against the database; never raises, never mutates.

    Predicates short-circuit in a fixed order: record exists, name matches,
    designation matches, amount within the signing limit.  String matches
    are exact and case-sensitive.
    """
    record = db.records.get(request.id)
    if record is None:
        return Decision(allowed=False, reason=f"no record with id {request.id}")
    if record.name != request.name:
        return Decision(
            allowed=False,
            reason=f"name {request.name!r} does not match the record for id {request.id}",
        )
    if record.designation != request.designation:
        return Decision(
            allowed=False,
            reason=f"designation {request.designation!r} does not match the record for id {request.id}",
        )
    if request.amount > record.signing_limit:
        return Decision(
            allowed=False,
            reason=f"amount {request.amount} exceeds signing limit {record.signing_limit}",
        )
    return Decision(allowed=True, reason=REASON_ALLOWED)


def apply_promotion(
    db: AuthorityDatabase,
    employee_id: int,
    new_designation: str,
    new_signing_limit: int,
) -> AuthorityDatabase:
    """Return a database where the employee carries the new grant.

    Promotions never reduce authority: the new signing limit must be at
    least the current one.  Name and id are untouched, as is every other
    record.
    """
    record = db.records.get(employee_id)
    if record is None:
        raise NotFoundError(f"no record with id {employee_id}")
    if new_signing_limit < record.signing_limit:
        raise ValidationError(
            f"promotion cannot reduce signing limit ({record.signing_limit} -> {new_signing_limit})"
        )
    records = dict(db.records)
    records[employee_id] = replace(
        record, designation=new_designation, signing_limit=new_signing_limit
    )
    return AuthorityDatabase(records=records)


def apply_event_log(
    db: AuthorityDatabase,
    events: Iterable[PromotionEvent],
    model: PipelineModel,
) -> AuthorityDatabase:
    """Replay a simulator event log, returning the resulting database.

    Admitted arrivals (from level 0) create records carrying level 1's grant
    under a synthesized ``emp-<id>`` name; admitted promotions rewrite the
    record with the destination level's grant; departures past the top level
    and blocked movements of existing employees remove the record.  Events
    must be timestamp-ordered, and replaying an event that is already
    reflected in the database changes nothing.
    """
    top = len(model.levels)
    records = dict(db.records)
    previous_timestamp = float("-inf")
    for event in events:
        if event.timestamp < previous_timestamp:
            raise ValidationError(
                f"event log is not timestamp-ordered at t={event.timestamp}"
            )
        previous_timestamp = event.timestamp
        if event.to_level > top + 1:
            raise ValidationError(
                f"event references level {event.to_level}, but the model has {top} levels"
            )
        if event.from_level == 0:
            if event.blocked:
                continue  # turned away at the door; never entered
            designation, signing_limit = authority_grant(model, 1)
            records[event.employee_id] = PolicyDocument(
                name=f"emp-{event.employee_id}",
                id=event.employee_id,
                designation=designation,
                signing_limit=signing_limit,
            )
        elif event.blocked or event.to_level == top + 1:
            records.pop(event.employee_id, None)
        else:
            record = records.get(event.employee_id)
            if record is None:
                raise NotFoundError(
                    f"promotion of unknown employee {event.employee_id} at t={event.timestamp}"
                )
            designation, signing_limit = authority_grant(model, event.to_level)
            if signing_limit < record.signing_limit:
                raise ValidationError(
                    f"promotion cannot reduce signing limit "
                    f"({record.signing_limit} -> {signing_limit})"
                )
            records[event.employee_id] = replace(
                record, designation=designation, signing_limit=signing_limit
            )
    return AuthorityDatabase(records=records)


_POLICY_FILE = re.compile(r"^(\d+)\.xml$")


def load_database(directory) -> AuthorityDatabase:
    """Load a database from a directory of ``<id>.xml`` policy files."""
    directory = Path(directory)
    records: dict[int, PolicyDocument] = {}
    for path in sorted(directory.iterdir()):
        match = _POLICY_FILE.match(path.name)
        if match is None:
            continue
        doc = parse_policy(path.read_text(encoding="utf-8"))
        file_id = int(match.group(1))
        if file_id != doc.id:
            raise ValidationError(
                f"{path.name}: file name id {file_id} does not match document id {doc.id}"
            )
        records[doc.id] = doc
    return AuthorityDatabase(records=records)


def save_database(db: AuthorityDatabase, directory) -> None:
    """Write a database to a directory, one ``<id>.xml`` file per record.

    The directory is made to represent the database exactly: policy files
    for ids no longer present are removed.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for doc in db.records.values():
        (directory / f"{doc.id}.xml").write_text(serialize_policy(doc), encoding="utf-8")
    for path in directory.iterdir():
        match = _POLICY_FILE.match(path.name)
        if match is not None and int(match.group(1)) not in db.records:
            path.unlink()
