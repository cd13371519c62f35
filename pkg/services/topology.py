"""Order complexes, reduced cohomology, the Cohen-Macaulay deciders and the
rank-filtration spectral sequence of Delta(Gamma_+)."""
import logging
from dataclasses import dataclass, field

from models import STAR, ElementSubset, EmptyArgument
from services.exactlin import EchelonBasis, ExactMatrix, cohomology_dims


logger = logging.getLogger(__name__)


class OrderComplex:
    """Chains of a subset of a ranked poset, stored bottom-to-top."""

    def __init__(self, poset, elements):
        self.poset = poset
        self.vertices = tuple(sorted(set(elements), key=poset.sort_key))
        self._position = {v: i for i, v in enumerate(self.vertices)}
        above = {
            v: [w for w in self.vertices if poset.less(v, w)]
            for v in self.vertices
        }

        chains = {}
        stack = [(v,) for v in reversed(self.vertices)]
        while stack:
            chain = stack.pop()
            chains.setdefault(len(chain) - 1, []).append(chain)
            for w in reversed(above[chain[-1]]):
                stack.append(chain + (w,))
        self.simplices = {
            d: sorted(found, key=lambda c: [self._position[v] for v in c])
            for d, found in chains.items()
        }
        self.simplices[-1] = [()]
        self._index = {d: {c: i for i, c in enumerate(found)} for d, found in self.simplices.items()}

    @classmethod
    def of(cls, subset):
        return cls(subset.parent, subset.members)

    @property
    def dimension(self):
        return max(self.simplices)

    def chains(self, d):
        return self.simplices.get(d, [])

    def index(self, d):
        return self._index.get(d, {})

    def coboundary(self, d, field):
        """delta: C^d -> C^{d+1}; inserting a vertex at position j carries sign (-1)^j."""
        sources = self.index(d)
        targets = self.chains(d + 1)
        entries = {}
        for row, tau in enumerate(targets):
            for j in range(len(tau)):
                sigma = tau[:j] + tau[j + 1:]
                col = sources.get(sigma)
                if col is not None:
                    entries.setdefault(row, {})[col] = 1 if j % 2 == 0 else -1
        return ExactMatrix.from_entries(entries, (len(targets), len(sources)), field)

    def reduced_cochain_maps(self, field):
        return [self.coboundary(d, field) for d in range(-1, self.dimension)]

    def cochain_maps(self, field):
        return [self.coboundary(d, field) for d in range(0, self.dimension)]

    def chain_counts(self):
        return tuple(len(self.chains(d)) for d in range(-1, self.dimension + 1))


def _as_complex(P, poset=None):
    if isinstance(P, OrderComplex):
        return P
    if isinstance(P, ElementSubset):
        return OrderComplex.of(P)
    if poset is None:
        # a RankedPoset stands for Gamma_+
        return OrderComplex(P, P.plus)
    return OrderComplex(poset, P)


def reduced_cohomology(P, field, poset=None):
    """Reduced cohomology dims of Delta(P), positions -1 .. dim."""
    complex_ = _as_complex(P, poset)
    maps = complex_.reduced_cochain_maps(field)
    return cohomology_dims(maps, dims=complex_.chain_counts(), start=-1)


def cohomology(P, field, poset=None):
    """Unreduced cohomology dims of Delta(P), positions 0 .. dim."""
    complex_ = _as_complex(P, poset)
    maps = complex_.cochain_maps(field)
    return cohomology_dims(maps, dims=complex_.chain_counts()[1:], start=0)




@dataclass
class Verdict:
    holds: bool
    witnesses: list = field(default_factory=list)

    def __bool__(self):
        return self.holds

    def to_dict(self):
        return {"holds": self.holds, "witnesses": [list(w) for w in self.witnesses]}


def is_cm(poset, field):
    """Every open interval (a, b) has reduced cohomology only in degree dim Delta((a, b))."""
    poset.require_cyclic()
    witnesses = []
    for b in poset.elements:
        for a in sorted(poset.below_set(b), key=poset.sort_key):
            top_degree = poset.rank_of(b) - poset.rank_of(a) - 2
            dims = reduced_cohomology(poset.open_interval(a, b), field)
            for n in dims.positions:
                if n != top_degree and dims.at(n):
                    witnesses.append((a, b, n))
    if witnesses:
        logger.info(f"Not Cohen-Macaulay over {field}: {len(witnesses)} failing intervals")
    return Verdict(not witnesses, witnesses)


def is_cm_alt(poset, field):
    """H~^{n-2}(Delta(Gamma_{x,k})) = 0 for every x in Gamma_+ and rk(x) >= k > n >= 1."""
    poset.require_cyclic()
    witnesses = []
    for x in poset.plus:
        for k in range(2, poset.rank_of(x) + 1):
            dims = reduced_cohomology(poset.gamma_ai(x, k), field)
            for n in range(1, k):
                if dims.at(n - 2):
                    witnesses.append((x, k, n))
    return Verdict(not witnesses, witnesses)




@dataclass
class SpectralPages:
    m: int
    pages: list
    differentials: list
    e1_expected: dict
    cohomology: tuple
    checks: dict

    def page(self, r):
        return self.pages[r]

    def dim(self, r, p, q):
        return self.pages[r].get((p, q), 0)

    def infinity_by_degree(self):
        totals = [0] * (self.m + 1)
        for (p, q), d in self.pages[self.m + 1].items():
            totals[p + q] += d
        return tuple(totals)

    def e1_concentrated(self):
        """True when E^1 vanishes off the line q = m - 2p."""
        return all(d == 0 for (p, q), d in self.pages[1].items() if q != self.m - 2 * p)

    @property
    def ok(self):
        return all(self.checks.values())

    def to_dict(self):
        def table(page):
            return [[p, q, d] for (p, q), d in sorted(page.items()) if d]

        return {
            "m": self.m,
            "pages": [table(page) for page in self.pages],
            "differential_ranks": [
                [[p, q, mat.rank()] for (p, q), mat in sorted(diffs.items()) if mat.rows and mat.cols]
                for diffs in self.differentials
            ],
            "e1_expected": table(self.e1_expected),
            "cohomology": list(self.cohomology),
            "e_infinity_by_degree": list(self.infinity_by_degree()),
            "checks": dict(self.checks),
        }


class _FilteredComplex:
    """Cochains of Delta(Gamma_+) filtered by the rank of the top vertex."""

    def __init__(self, poset, field):
        self.field = field
        self.m = poset.rank - 1
        self.complex = OrderComplex(poset, poset.plus)
        self.filtration = {
            n: [self.m + 1 - poset.rank_of(chain[-1]) for chain in self.complex.chains(n)]
            for n in range(self.m + 1)
        }
        self.maps = {n: self.complex.coboundary(n, field) for n in range(self.m + 1)}
        self.map_entries = {n: mat.entries() for n, mat in self.maps.items()}
        self._z = {}

    def size(self, n):
        return len(self.filtration.get(n, []))

    def image(self, n, vector):
        """d applied to a sparse vector of C^n."""
        out = {}
        for row, entries in self.map_entries[n].items():
            total = self.field.zero
            for col, value in entries.items():
                if col in vector:
                    total += value * vector[col]
            if not self.field.is_zero(total):
                out[row] = total
        return out

    def cycles(self, r, p, n):
        """Z^r_p in degree n: x in F_p with dx in F_{p-r}; r = -1 gives F_p itself."""
        key = (r, p, n)
        if key in self._z:
            return self._z[key]
        if p < 0 or n < 0 or n > self.m:
            basis = []
        else:
            columns = [i for i, f in enumerate(self.filtration[n]) if f <= p]
            if r < 0 or not columns:
                basis = [{c: self.field.one} for c in columns]
            else:
                rows = [i for i, f in enumerate(self.filtration.get(n + 1, [])) if f > p - r]
                constraint = self.maps[n].select(rows=rows, cols=columns)
                basis = [
                    {columns[c]: v for c, v in vec.items()}
                    for vec in constraint.kernel_basis().row_vectors()
                ]
        self._z[key] = basis
        return basis

    def page_basis(self, r, p, n):
        """Echelon of Z^{r-1}_{p-1} + d Z^{r-1}_{p+r-1} with representatives of E^r_p tracked."""
        echelon = EchelonBasis(self.field)
        for vec in self.cycles(r - 1, p - 1, n):
            echelon.add(vec)
        for vec in self.cycles(r - 1, p + r - 1, n - 1):
            echelon.add(self.image(n - 1, vec))
        representatives = []
        for vec in self.cycles(r, p, n):
            if echelon.add(vec, label=len(representatives)):
                representatives.append(vec)
        echelon.tracked = len(representatives)
        return echelon, representatives


def spectral_sequence(poset, field):
    """Pages E^0 .. E^{m+2} with their differentials and the consistency checks."""
    if poset.rank < 1:
        raise EmptyArgument("The spectral sequence needs a poset of rank at least 1")
    fc = _FilteredComplex(poset, field)
    m = fc.m
    last = m + 2
    degrees = range(m + 1)
    filtrations = range(m + 1)

    bases = {}
    pages = []
    for r in range(last + 1):
        page = {}
        for p in filtrations:
            for n in degrees:
                bases[(r, p, n)] = fc.page_basis(r, p, n)
                page[(p, n - p)] = len(bases[(r, p, n)][1])
        pages.append(page)

    differentials = []
    for r in range(last + 1):
        diffs = {}
        for p in filtrations:
            for n in degrees:
                _, sources = bases[(r, p, n)]
                target = bases.get((r, p - r, n + 1))
                target_dim = len(target[1]) if target else 0
                entries = {}
                for col, vec in enumerate(sources):
                    if not target_dim:
                        continue
                    coords = target[0].coordinates(fc.image(n, vec))
                    for row, value in coords.items():
                        entries.setdefault(row, {})[col] = value
                diffs[(p, n - p)] = ExactMatrix.from_entries(entries, (target_dim, len(sources)), field)
        differentials.append(diffs)

    # E^{r+1} is the cohomology of (E^r, d^r)
    pages_consistent = True
    for r in range(last):
        for (p, q), mat in differentials[r].items():
            incoming = differentials[r].get((p + r, q - r - 1))
            incoming_rank = incoming.rank() if incoming is not None else 0
            expected = pages[r][(p, q)] - mat.rank() - incoming_rank
            if expected != pages[r + 1][(p, q)]:
                logger.warning(f"Page {r + 1} at ({p}, {q}) has dim {pages[r + 1][(p, q)]}, expected {expected}")
                pages_consistent = False

    e1_expected = {}
    for p in filtrations:
        level = poset.level(m + 1 - p)
        per_element = [reduced_cohomology(poset.open_interval(STAR, x), field) for x in level]
        for n in degrees:
            e1_expected[(p, n - p)] = sum(dims.at(n - 1) for dims in per_element)

    total = cohomology(OrderComplex(poset, poset.plus), field)
    infinity = [0] * (m + 1)
    for (p, q), d in pages[m + 1].items():
        infinity[p + q] += d

    checks = {
        "pages_consistent": pages_consistent,
        "e0_vanishing": all(d == 0 for (p, q), d in pages[0].items() if q > m - 2 * p),
        "e1_matches_interval_cohomology": all(pages[1][key] == e1_expected[key] for key in pages[1]),
        "stabilized": pages[m + 1] == pages[m + 2],
        "converges": tuple(infinity) == tuple(total.at(n) for n in degrees),
    }
    if not all(checks.values()):
        logger.warning(f"Spectral sequence checks failed over {field}: {checks}")
    return SpectralPages(
        m=m,
        pages=pages,
        differentials=differentials,
        e1_expected=e1_expected,
        cohomology=tuple(total.at(n) for n in degrees),
        checks=checks,
    )
