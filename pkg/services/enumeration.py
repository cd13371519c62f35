"""Exhaustive and random generation of cyclic ranked posets.

Posets are built level by level: ``profile[i]`` is the number of elements of
rank ``i + 1`` and the last entry is always 1 (the top). Between adjacent
levels a pattern is any bipartite cover set in which every upper element
covers something and every lower element is covered by something, so the
choices for different level pairs are independent.
"""
import logging
import random
from dataclasses import dataclass, field
from itertools import permutations, product

from models import STAR, OutOfRange, RankedPoset


logger = logging.getLogger(__name__)


class BudgetExceeded(RuntimeError):
    def __init__(self, candidates, budget):
        self.candidates, self.budget = candidates, budget
        super().__init__(
            f"Enumeration needs {candidates} candidate cover patterns, over the budget of {budget}; "
            f"lower --max-elements or --max-rank, or use --random"
        )


@dataclass(frozen=True)
class EnumerationSpec:
    max_elements: int
    max_rank: int = None
    profiles: tuple = None
    reject_isomorphs: bool = True
    fields: tuple = ("rational",)
    canonical_limit: int = 8
    budget: int = 2_000_000

    def __post_init__(self):
        if self.max_elements < 2:
            raise OutOfRange(f"max_elements must be at least 2, got {self.max_elements}")
        if self.max_rank is not None and self.max_rank < 1:
            raise OutOfRange(f"max_rank must be at least 1, got {self.max_rank}")
        if self.reject_isomorphs and self.max_elements - 1 > self.canonical_limit:
            raise OutOfRange(
                f"Isomorph rejection is limited to {self.canonical_limit} elements above *; "
                f"disable it or lower max_elements"
            )

    def level_profiles(self):
        """Every admissible profile in (size, rank, profile) order."""
        found = []
        top_rank = self.max_elements - 1
        if self.max_rank is not None:
            top_rank = min(top_rank, self.max_rank)
        for rank in range(1, top_rank + 1):
            for below in _compositions_up_to(self.max_elements - 2, rank - 1):
                profile = tuple(below) + (1,)
                if self.profiles is None or profile in self.profiles:
                    found.append(profile)
        return sorted(found, key=lambda p: (sum(p), len(p), p))

    def to_dict(self):
        return {
            "max_elements": self.max_elements,
            "max_rank": self.max_rank,
            "profiles": [list(p) for p in self.profiles] if self.profiles is not None else None,
            "reject_isomorphs": self.reject_isomorphs,
            "fields": list(self.fields),
        }


def _compositions_up_to(total, parts):
    """Tuples of ``parts`` positive integers with sum at most ``total``."""
    if parts == 0:
        yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions_up_to(total - first, parts - 1):
            yield (first,) + rest


def element_id(rank, i):
    return f"x{rank}_{i}"


def level_patterns(upper, lower):
    """Valid cover sets between a level of size ``upper`` and the level of size ``lower`` below it."""
    cells = [(u, l) for u in range(upper) for l in range(lower)]
    out = []
    for mask in range(1 << len(cells)):
        chosen = frozenset(c for bit, c in enumerate(cells) if mask >> bit & 1)
        if {u for u, _ in chosen} == set(range(upper)) and {l for _, l in chosen} == set(range(lower)):
            out.append(chosen)
    return out


def from_pattern(profile, pattern):
    """Build the poset with ids ``x{rank}_{i}``; ``pattern[i]`` covers rank ``i + 2`` over rank ``i + 1``."""
    ranks = {STAR: 0}
    covers = set()
    for r, size in enumerate(profile, start=1):
        for i in range(size):
            ranks[element_id(r, i)] = r
            if r == 1:
                covers.add((element_id(1, i), STAR))
    for r, chosen in enumerate(pattern, start=1):
        covers.update((element_id(r + 1, u), element_id(r, l)) for u, l in chosen)
    return RankedPoset(ranks, covers)


def candidate_count(profiles):
    total = 0
    for profile in profiles:
        count = 1
        for lower, upper in zip(profile, profile[1:]):
            count *= 1 << (lower * upper)
        total += count
    return total


def canonical_form(poset):
    """Lexicographically least cover list over all level-wise relabelings.

    Returns ``(key, mapping)`` where ``mapping`` renames every element to its
    canonical ``x{rank}_{i}`` id.
    """
    levels = [poset.level(r) for r in range(1, poset.rank + 1)]
    covers = [(u, l) for u, l in poset.covers if l != STAR]
    best_key, best_position = None, None
    for choice in product(*(permutations(level) for level in levels)):
        position = {x: i for level in choice for i, x in enumerate(level)}
        key = tuple(sorted((poset.rank_of(u), position[u], position[l]) for u, l in covers))
        if best_key is None or key < best_key:
            best_key, best_position = key, position
    profile = tuple(len(level) for level in levels)
    mapping = {x: element_id(poset.rank_of(x), i) for x, i in best_position.items()}
    return (profile, best_key), mapping


def canonical_poset(poset):
    _, mapping = canonical_form(poset)
    return poset.relabel(mapping)


def enumerate_cyclic(spec):
    """Yield every cyclic poset allowed by ``spec``, one per isomorphism class when rejection is on."""
    profiles = spec.level_profiles()
    candidates = candidate_count(profiles)
    if candidates > spec.budget:
        raise BudgetExceeded(candidates, spec.budget)
    logger.info(f"Enumerating {len(profiles)} level profiles ({candidates} candidate patterns)")

    seen = set()
    produced = 0
    for profile in profiles:
        choices = [level_patterns(upper, lower) for lower, upper in zip(profile, profile[1:])]
        for pattern in product(*choices):
            poset = from_pattern(profile, pattern)
            if spec.reject_isomorphs:
                key, mapping = canonical_form(poset)
                if key in seen:
                    continue
                seen.add(key)
                poset = poset.relabel(mapping)
            produced += 1
            yield poset
    logger.info(f"Enumeration produced {produced} posets")


@dataclass
class RandomSampler:
    """Seeded sampler: level sizes first, then every adjacent pair is a cover with probability 1/2."""

    seed: int = 0
    max_rank: int = 3
    max_width: int = 3
    max_attempts: int = 10_000
    rng: random.Random = field(init=False, repr=False)

    def __post_init__(self):
        if self.max_rank < 1 or self.max_width < 1:
            raise OutOfRange("max_rank and max_width must be at least 1")
        self.rng = random.Random(self.seed)

    def profile(self, rank=None):
        rank = rank or self.rng.randint(1, self.max_rank)
        return tuple(self.rng.randint(1, self.max_width) for _ in range(rank - 1)) + (1,)

    def sample(self, rank=None):
        for _ in range(self.max_attempts):
            profile = self.profile(rank)
            pattern = []
            for lower, upper in zip(profile, profile[1:]):
                pattern.append(frozenset(
                    (u, l) for u in range(upper) for l in range(lower) if self.rng.random() < 0.5
                ))
            valid = all(
                {u for u, _ in chosen} == set(range(upper)) and {l for _, l in chosen} == set(range(lower))
                for chosen, lower, upper in zip(pattern, profile, profile[1:])
            )
            if valid:
                return from_pattern(profile, pattern)
        raise BudgetExceeded(self.max_attempts, self.max_attempts)

    def __iter__(self):
        while True:
            yield self.sample()


def random_cyclic(seed, count, max_rank=3, max_width=3):
    """``count`` seeded random cyclic posets."""
    sampler = RandomSampler(seed=seed, max_rank=max_rank, max_width=max_width)
    return [sampler.sample() for _ in range(count)]
