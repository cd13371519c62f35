import json
import logging
from functools import wraps
from pathlib import Path

import click
from flask import current_app

from models import PosetError, validate
from services.algebra import BoundTooLarge
from services.analysis import PredicateError
from services.enumeration import BudgetExceeded
from services.exactlin import FieldError, FieldSpec
from services.fixtures import UnknownFixture, fixture
from utils.report import emit


logger = logging.getLogger(__name__)

DOCUMENT_KEYS = {"name", "field", "elements", "covers"}
ELEMENT_KEYS = {"id", "rank"}
FIXTURE_PREFIX = "fixture:"




class DocumentError(ValueError):
    """A poset document that is not valid JSON or does not have the expected shape."""




def parse_document(text):
    """Read a poset document; returns ``(poset, {"name": ..., "field": ...})``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"Not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise DocumentError("A poset document must be a JSON object")

    unknown = sorted(set(doc) - DOCUMENT_KEYS)
    if unknown:
        raise DocumentError(f"Unknown key(s) {', '.join(unknown)}; allowed: {', '.join(sorted(DOCUMENT_KEYS))}")
    for key in ("elements", "covers"):
        if not isinstance(doc.get(key), list):
            raise DocumentError(f"{key} is required and must be a list")

    ids, ranks = [], {}
    for entry in doc["elements"]:
        if not isinstance(entry, dict) or set(entry) != ELEMENT_KEYS or not isinstance(entry["id"], str):
            raise DocumentError(f"Each element must be an object with exactly a string id and a rank, got {entry!r}")
        ids.append(entry["id"])
        ranks.setdefault(entry["id"], entry["rank"])
    for pair in doc["covers"]:
        if not isinstance(pair, list) or len(pair) != 2 or not all(isinstance(x, str) for x in pair):
            raise DocumentError(f"Each cover must be an [upper, lower] pair of ids, got {pair!r}")

    field = doc.get("field")
    if field is not None:
        field = FieldSpec.parse(field).tag
    poset = validate(ids, ranks, doc["covers"])
    return poset, {"name": doc.get("name", ""), "field": field}


def document_from_poset(poset, name="", field=None):
    doc = {"name": name, **poset.to_dict()}
    if field is not None:
        doc["field"] = FieldSpec.parse(field).tag
    return doc


def serialize_document(doc):
    """Canonical text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_source(source):
    """A document path or ``fixture:NAME``; returns ``(poset, meta)``."""
    if source.startswith(FIXTURE_PREFIX):
        name = source[len(FIXTURE_PREFIX):]
        return fixture(name), {"name": name.lower(), "field": None}
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise DocumentError(f"Cannot read {source}: {e.strerror or e}") from None
    poset, meta = parse_document(text)
    if not meta["name"]:
        meta["name"] = path.name.split(".")[0]
    return poset, meta




def parse_fields(values, document_field=None):
    """``--field`` flags (repeatable, comma lists allowed), then the document's field, then POSET_FIELD."""
    tags = [t for value in values or () for t in value.split(",") if t.strip()]
    if not tags and document_field:
        tags = [document_field]
    if not tags:
        tags = [current_app.config["POSET_FIELD"]]
    fields = []
    for tag in tags:
        spec = FieldSpec.parse(tag)
        if spec not in fields:
            fields.append(spec)
    return fields




INPUT_ERRORS = (
    PosetError,
    DocumentError,
    FieldError,
    UnknownFixture,
    PredicateError,
    BoundTooLarge,
    BudgetExceeded,
)


def error_payload(error):
    violations = getattr(error, "violations", None) or [error]
    return {
        "error": type(error).__name__,
        "details": [{"code": type(v).__name__, "message": str(v)} for v in violations],
    }


def cli_errors(f):
    """Turn input errors into a JSON error document and exit status 1"""
    @wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except INPUT_ERRORS as e:
            logger.error(f"{f.__name__} failed: {type(e).__name__}: {e}")
            emit(error_payload(e))
            click.get_current_context().exit(1)

    return wrapper


def finish(ok):
    """Exit status 2 when a theorem check failed."""
    if not ok:
        click.get_current_context().exit(2)
