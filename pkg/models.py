import logging
from dataclasses import dataclass, field as dc_field

import networkx as nx


logger = logging.getLogger(__name__)

STAR = "*"




class PosetError(ValueError):
    """Base class for every invalid-input condition on posets and subsets."""

    def __init__(self, message):
        super().__init__(message)
        self.violations = [self]

    @property
    def code(self):
        return type(self).__name__


class RankGap(PosetError):
    pass


class DanglingElement(PosetError):
    pass


class UnknownElement(PosetError):
    pass


class DuplicateElement(PosetError):
    pass


class ReservedElement(PosetError):
    pass


class InvalidRank(PosetError):
    pass


class NoUpwardPath(PosetError):
    pass


class NotCyclic(NoUpwardPath):
    pass


class NotPure(PosetError):
    pass


class RankMismatch(PosetError):
    pass


class EmptyArgument(PosetError):
    pass


class EmptyW(EmptyArgument):
    pass


class WNotLevel(PosetError):
    pass


class OutOfRange(PosetError):
    pass




def find_violations(elements, ranks, covers):
    """Every reason ``(elements, ranks, covers)`` is not a ranked poset."""
    violations = []
    ids = []
    seen = set()
    for x in elements:
        if not isinstance(x, str) or not x:
            violations.append(PosetError(f"Element identifiers must be non-empty strings, got {x!r}"))
            continue
        if x in seen:
            violations.append(DuplicateElement(f"Element {x!r} is listed twice"))
            continue
        seen.add(x)
        ids.append(x)

    rank_of = {STAR: 0}
    for x in ids:
        r = ranks.get(x)
        if x == STAR:
            if r not in (None, 0):
                violations.append(ReservedElement(f"{STAR} is the minimum and must have rank 0, got {r!r}"))
            continue
        if not isinstance(r, int) or isinstance(r, bool):
            violations.append(InvalidRank(f"Element {x!r} needs an integer rank, got {r!r}"))
            continue
        if r < 1:
            violations.append(ReservedElement(f"Element {x!r} has rank {r}; rank 0 is reserved for {STAR}"))
            continue
        rank_of[x] = r

    has_cover = set()
    for pair in covers:
        try:
            upper, lower = pair
        except (TypeError, ValueError):
            violations.append(PosetError(f"Cover {pair!r} is not an (upper, lower) pair"))
            continue
        missing = [e for e in (upper, lower) if e not in rank_of]
        if missing:
            violations.append(UnknownElement(f"Cover ({upper}, {lower}) names unknown element(s) {', '.join(map(str, missing))}"))
            continue
        if rank_of[upper] != rank_of[lower] + 1:
            violations.append(RankGap(
                f"Cover ({upper}, {lower}) joins rank {rank_of[upper]} to rank {rank_of[lower]}; covers must drop rank by exactly 1"
            ))
            continue
        has_cover.add(upper)

    for x, r in rank_of.items():
        if r >= 2 and x not in has_cover:
            violations.append(DanglingElement(f"Element {x!r} of rank {r} covers nothing"))
    return violations


def validate(elements, ranks, covers):
    """Build a :class:`RankedPoset`, adjoining ``*`` under every rank-1 element.

    Raises the first violation found; the full list is on ``.violations``.
    """
    elements = list(elements)
    covers = [tuple(c) if isinstance(c, (list, tuple)) else c for c in covers]
    violations = find_violations(elements, ranks, covers)
    if violations:
        first = violations[0]
        first.violations = violations
        raise first

    rank_of = {STAR: 0}
    rank_of.update({x: ranks[x] for x in elements if x != STAR})
    pairs = {tuple(c) for c in covers}
    pairs.update((x, STAR) for x, r in rank_of.items() if r == 1)
    return RankedPoset(rank_of, pairs)




class RankedPoset:
    """A finite ranked poset with minimum ``*``, given by ranks and covers.

    Instances are immutable. Build them with :func:`validate`; the constructor
    trusts its input.
    """

    def __init__(self, ranks, covers):
        self._rank = dict(ranks)
        self._cover_pairs = frozenset(covers)
        self.elements = tuple(sorted(self._rank, key=self.sort_key))

        lower = {x: [] for x in self.elements}
        upper = {x: [] for x in self.elements}
        for u, l in self._cover_pairs:
            lower[u].append(l)
            upper[l].append(u)
        self._lower = {x: tuple(sorted(v, key=self.sort_key)) for x, v in lower.items()}
        self._upper = {x: tuple(sorted(v, key=self.sort_key)) for x, v in upper.items()}

        self._down = {}
        for x in self.elements:
            below = set()
            for y in self._lower[x]:
                below.add(y)
                below |= self._down[y]
            self._down[x] = frozenset(below)

    def sort_key(self, x):
        return (self._rank[x], x)

    def __contains__(self, x):
        return x in self._rank

    def __len__(self):
        return len(self._rank)

    def __eq__(self, other):
        if not isinstance(other, RankedPoset):
            return NotImplemented
        return self._rank == other._rank and self._cover_pairs == other._cover_pairs

    def __hash__(self):
        return hash((frozenset(self._rank.items()), self._cover_pairs))

    def __repr__(self):
        return f"<RankedPoset {len(self)} elements, rank {self.rank}>"

    def __reduce__(self):
        return (RankedPoset, (self._rank, set(self._cover_pairs)))

    # ranks and covers

    @property
    def rank(self):
        return max(self._rank.values())

    def rank_of(self, x):
        try:
            return self._rank[x]
        except KeyError:
            raise UnknownElement(f"Unknown element {x!r}") from None

    @property
    def covers(self):
        return tuple(sorted(self._cover_pairs, key=lambda c: (self.sort_key(c[0]), self.sort_key(c[1]))))

    def lower_covers(self, x):
        """Elements covered by ``x``."""
        self.rank_of(x)
        return self._lower[x]

    def upper_covers(self, x):
        self.rank_of(x)
        return self._upper[x]

    def covers_pair(self, x, y):
        return (x, y) in self._cover_pairs

    def less(self, x, y):
        return x in self._down[y]

    def below_set(self, x):
        return self._down[x]

    def level(self, n):
        return tuple(x for x in self.elements if self._rank[x] == n)

    @property
    def plus(self):
        """Elements other than ``*``."""
        return self.elements[1:]

    @property
    def maximal_elements(self):
        return tuple(x for x in self.elements if not self._upper[x])

    def is_cyclic(self):
        return len(self.maximal_elements) == 1

    def is_pure(self):
        return len({self._rank[x] for x in self.maximal_elements}) == 1

    @property
    def top(self):
        self.require_cyclic()
        return self.maximal_elements[0]

    def require_cyclic(self):
        maximal = self.maximal_elements
        if len(maximal) != 1:
            highest = max(maximal, key=self.sort_key)
            stray = [x for x in maximal if x != highest]
            raise NotCyclic(f"No upward path from {', '.join(stray)} to {highest}; the poset has {len(maximal)} maximal elements")

    def require_pure(self):
        if not self.is_pure():
            raise NotPure("Maximal elements have different ranks")

    # subposets

    def _restrict(self, members):
        members = set(members) | {STAR}
        ranks = {x: self._rank[x] for x in members}
        pairs = {(u, l) for u, l in self._cover_pairs if u in members and l in members}
        return RankedPoset(ranks, pairs)

    def subset(self, members, level=None):
        return ElementSubset(self, frozenset(members), level)

    def principal_ideal(self, x):
        """Gamma_x = [*, x]."""
        self.rank_of(x)
        return self._restrict(self._down[x] | {x})

    def below(self, W):
        """Gamma_W, the union of [*, s] over s in W."""
        W = self._as_members(W)
        if not W:
            raise EmptyW("W must be non-empty")
        members = set(W)
        for s in W:
            members |= self._down[s]
        return self._restrict(members)

    def truncate(self, k):
        """Gamma^{>k} with ranks shifted down by ``k``."""
        if not 0 <= k <= self.rank:
            raise OutOfRange(f"k={k} outside 0..{self.rank}")
        kept = [x for x in self.plus if self._rank[x] > k]
        ranks = {STAR: 0}
        ranks.update({x: self._rank[x] - k for x in kept})
        pairs = {(u, l) for u, l in self._cover_pairs if u in ranks and l in ranks and l != STAR}
        pairs.update((x, STAR) for x in kept if self._rank[x] == k + 1)
        return RankedPoset(ranks, pairs)

    def gamma_ai(self, a, i):
        """Gamma_{a,i}: elements w < a, w != *, within ``i - 1`` ranks of ``a``."""
        r = self.rank_of(a)
        if not 1 <= i <= r:
            raise OutOfRange(f"i={i} outside 1..{r} for {a!r}")
        return self.subset(w for w in self._down[a] if w != STAR and self._rank[w] > r - i)

    def layer_window(self, W, k):
        """Gamma(W, k) = {y in Gamma_W : n - k <= rank(y) <= n}; never contains *."""
        W = self._as_members(W)
        n = self.level_of(W)
        if not 0 <= k <= n - 1:
            raise OutOfRange(f"k={k} outside 0..{n - 1} for a level-{n} set")
        members = set(W)
        for s in W:
            members |= {y for y in self._down[s] if self._rank[y] >= n - k}
        return self.subset(members)

    def sphere(self, x, k):
        """S_x(k): elements below ``x`` exactly ``k`` ranks down (may be ``*``)."""
        r = self.rank_of(x)
        if not 0 <= k <= r:
            raise OutOfRange(f"k={k} outside 0..{r} for {x!r}")
        if k == 0:
            return self.subset({x}, r)
        return self.subset((y for y in self._down[x] if self._rank[y] == r - k), r - k)

    def open_interval(self, a, b):
        self.rank_of(a)
        self.rank_of(b)
        return self.subset(c for c in self._down[b] if a in self._down[c])

    def level_of(self, W):
        """Common rank of a non-empty level set ``W``."""
        W = self._as_members(W)
        if not W:
            raise EmptyW("W must be non-empty")
        levels = {self._rank[s] for s in W}
        if len(levels) != 1:
            raise WNotLevel(f"W = {sorted(W)} spans ranks {sorted(levels)}")
        n = levels.pop()
        if n == 0:
            raise WNotLevel(f"W may not contain {STAR}")
        return n

    def _as_members(self, W):
        members = frozenset(W.members if isinstance(W, ElementSubset) else W)
        for s in members:
            self.rank_of(s)
        return members

    # constructions

    def dual(self):
        """Order-reversed poset; the old top becomes ``*`` and ``*`` takes the top's id."""
        self.require_cyclic()
        self.require_pure()
        top = self.top
        height = self._rank[top]
        rename = {top: STAR, STAR: top}
        ranks = {rename.get(x, x): height - self._rank[x] for x in self.elements}
        pairs = {(rename.get(l, l), rename.get(u, u)) for u, l in self._cover_pairs}
        return RankedPoset(ranks, pairs)

    def wedge(self, other, prefixes=("L.", "R.")):
        """Disjoint union glued at ``*``; both operands must have equal rank."""
        if self.rank != other.rank:
            raise RankMismatch(f"Cannot wedge posets of rank {self.rank} and {other.rank}")
        left, right = prefixes
        ranks = {STAR: 0}
        pairs = set()
        for prefix, poset in ((left, self), (right, other)):
            name = lambda x, p=prefix: x if x == STAR else f"{p}{x}"
            ranks.update({name(x): poset._rank[x] for x in poset.plus})
            pairs.update((name(u), name(l)) for u, l in poset._cover_pairs)
        return RankedPoset(ranks, pairs)

    def adjoin_top(self, name="top"):
        """Add one element covering every maximal element."""
        self.require_pure()
        while name in self._rank:
            name = f"{name}'"
        ranks = dict(self._rank)
        ranks[name] = self.rank + 1
        pairs = set(self._cover_pairs)
        pairs.update((name, x) for x in self.maximal_elements)
        return RankedPoset(ranks, pairs)

    def drop_top(self):
        """Gamma' = Gamma without its top-rank level."""
        if self.rank == 0:
            raise EmptyArgument("Cannot drop the top of the one-point poset")
        return self._restrict(x for x in self.elements if self._rank[x] < self.rank)

    def relabel(self, mapping):
        if STAR in mapping and mapping[STAR] != STAR:
            raise ReservedElement(f"{STAR} cannot be renamed")
        name = lambda x: mapping.get(x, x)
        ranks = {name(x): r for x, r in self._rank.items()}
        if len(ranks) != len(self._rank):
            raise DuplicateElement("Relabeling merges two elements")
        return RankedPoset(ranks, {(name(u), name(l)) for u, l in self._cover_pairs})

    def to_dict(self):
        return {
            "elements": [{"id": x, "rank": self._rank[x]} for x in self.plus],
            "covers": [[u, l] for u, l in self.covers if l != STAR],
        }




@dataclass(frozen=True)
class ElementSubset:
    parent: RankedPoset = dc_field(compare=False, hash=False, repr=False)
    members: frozenset
    level: int = None

    def __post_init__(self):
        unknown = [x for x in self.members if x not in self.parent]
        if unknown:
            raise UnknownElement(f"Unknown element(s) {sorted(unknown)}")
        if self.level is not None and any(self.parent.rank_of(x) != self.level for x in self.members):
            raise WNotLevel(f"Not every member has rank {self.level}")

    def __iter__(self):
        return iter(self.sorted())

    def __len__(self):
        return len(self.members)

    def __contains__(self, x):
        return x in self.members

    def sorted(self):
        return sorted(self.members, key=self.parent.sort_key)

    def induced_covers(self):
        return [(u, l) for u, l in self.parent.covers if u in self.members and l in self.members]

    def hasse_graph(self):
        graph = nx.Graph()
        graph.add_nodes_from(self.sorted())
        graph.add_edges_from(self.induced_covers())
        return graph


def hasse_connected(subset):
    """True iff the Hasse graph induced on ``subset`` is connected; empty counts as connected."""
    if len(subset) <= 1:
        return True
    return nx.is_connected(subset.hasse_graph())
