"""Built-in posets, available as ``fixture:NAME`` wherever a document path is accepted."""
from functools import lru_cache

from models import validate


class UnknownFixture(LookupError):
    pass


def _document(name, levels, covers):
    ranks = {x: r for r, level in enumerate(levels, start=1) for x in level}
    return {"name": name, "ranks": ranks, "covers": [tuple(c) for c in covers]}


_DOCUMENTS = {
    "chain3": _document(
        "chain3",
        [["c1"], ["c2"], ["c3"]],
        [("c2", "c1"), ("c3", "c2")],
    ),
    "diamond": _document(
        "diamond",
        [["a", "b"], ["c"]],
        [("c", "a"), ("c", "b")],
    ),
    "pinch": _document(
        "pinch",
        [["a", "b"], ["u", "v"], ["x"]],
        [("u", "a"), ("v", "b"), ("x", "u"), ("x", "v")],
    ),
    "cycle4": _document(
        "cycle4",
        [["a", "b"], ["u", "v"], ["x"]],
        [("u", "a"), ("u", "b"), ("v", "a"), ("v", "b"), ("x", "u"), ("x", "v")],
    ),
    # three rank-1 atoms, each rank-2 element on two adjacent atoms, each
    # rank-3 element on two adjacent rank-2 elements, one top
    "hexring": _document(
        "hexring",
        [["w12", "w23", "w31"], ["z1", "z2", "z3"], ["y1", "y2", "y3"], ["x"]],
        [
            ("z1", "w31"), ("z1", "w12"),
            ("z2", "w12"), ("z2", "w23"),
            ("z3", "w23"), ("z3", "w31"),
            ("y1", "z1"), ("y1", "z2"),
            ("y2", "z2"), ("y2", "z3"),
            ("y3", "z3"), ("y3", "z1"),
            ("x", "y1"), ("x", "y2"), ("x", "y3"),
        ],
    ),
}


def fixture_names():
    return sorted(list(_DOCUMENTS) + ["wedge"])


@lru_cache(maxsize=None)
def fixture(name):
    """The named built-in poset; ``wedge`` is the adjoined-top wedge of two copies of ``cycle4``."""
    key = name.lower()
    if key == "wedge":
        cycle = fixture("cycle4")
        return cycle.wedge(cycle).adjoin_top()
    if key not in _DOCUMENTS:
        raise UnknownFixture(f"No fixture named {name!r}; choose from {', '.join(fixture_names())}")
    doc = _DOCUMENTS[key]
    return validate(list(doc["ranks"]), doc["ranks"], doc["covers"])
