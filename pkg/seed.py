#!/usr/bin/env python3
"""
Seed script to write the built-in posets as canonical documents.
Run: python seed.py [DIRECTORY]
"""
import logging
import sys
from pathlib import Path

from services.fixtures import fixture, fixture_names
from utils import document_from_poset, serialize_document


logger = logging.getLogger(__name__)


def seed_documents(directory="fixtures", names=None):
    target = Path(directory)
    target.mkdir(parents=True, exist_ok=True)
    written = []
    for name in names or fixture_names():
        path = target / f"{name}.poset.json"
        path.write_text(serialize_document(document_from_poset(fixture(name), name)), encoding="utf-8")
        logger.info(f"Wrote {path}")
        written.append(path)
    return written


if __name__ == '__main__':
    logging.basicConfig(level=logging.INFO)
    paths = seed_documents(*sys.argv[1:2])
    print(f"Seeded {len(paths)} poset documents")
