"""The graded quadratic algebra R_Gamma of a ranked poset.

Degree-d components are spanned by covering-chain words ``(b1, ..., bd)`` with
``b1 -> b2 -> ... -> bd`` inside Gamma_+, modulo the relations
``r_x * sum(r_y for x -> y)`` padded on both sides by covering chains. Every
other monomial is zero in R_Gamma and never enters a basis.
"""
import logging
from dataclasses import dataclass, field as dc_field

from models import STAR, OutOfRange
from services.exactlin import EchelonBasis, ExactMatrix, Quotient, cohomology_dims, span_rank
from services.topology import Verdict, reduced_cohomology


logger = logging.getLogger(__name__)


class BoundTooLarge(RuntimeError):
    def __init__(self, step, degree, size, cap):
        self.step, self.degree, self.size, self.cap = step, degree, size, cap
        super().__init__(f"Resolution step {step}, degree {degree} needs dimension {size} > cap {cap}")


class GradedComponent:
    def __init__(self, degree, words, relations, field):
        self.degree = degree
        self.words = tuple(words)
        self.index = {w: i for i, w in enumerate(self.words)}
        self.relations = relations
        self.quotient = Quotient(len(self.words), relations, field)
        self.basis_words = tuple(self.words[c] for c in self.quotient.basis_positions)

    @property
    def dim(self):
        return self.quotient.dim

    def __repr__(self):
        return f"<GradedComponent degree {self.degree}: {len(self.words)} words, dim {self.dim}>"


class GradedAlgebra:
    """Covering-chain word bases of R_Gamma with projections onto quotient coordinates."""

    def __init__(self, poset, field, components):
        self.poset = poset
        self.field = field
        self.components = components
        self.letters = tuple(sorted(poset.plus))
        self._reduced = {}

    def component(self, d):
        if 0 <= d < len(self.components):
            return self.components[d]
        return None

    def dim(self, d):
        c = self.component(d)
        return c.dim if c is not None else 0

    @property
    def top_degree(self):
        return max((d for d, c in enumerate(self.components) if c.dim), default=0)

    def hilbert(self):
        dims = [c.dim for c in self.components]
        while len(dims) > 1 and dims[-1] == 0:
            dims.pop()
        return tuple(dims)

    def basis_word(self, d, j):
        return self.components[d].basis_words[j]

    def covers(self, x, y):
        return y != STAR and self.poset.covers_pair(x, y)

    def concat(self, u, w):
        """Concatenation of two words, or None when the product is a killed monomial."""
        if u and w and not self.covers(u[-1], w[0]):
            return None
        return tuple(u) + tuple(w)

    def reduce_word(self, word):
        """Quotient coordinates of a word in degree ``len(word)``."""
        if word in self._reduced:
            return self._reduced[word]
        component = self.component(len(word))
        if component is None or word not in component.index:
            vector = {}
        else:
            vector = component.quotient.project({component.index[word]: self.field.one})
        self._reduced[word] = vector
        return vector

    def letter_vector(self, coefficients):
        """Degree-1 quotient vector of ``sum(c * r_z)``."""
        out = {}
        for z, c in coefficients.items():
            for k, v in self.reduce_word((z,)).items():
                out[k] = out.get(k, self.field.zero) + self.field(c) * v
        return {k: c for k, c in out.items() if not self.field.is_zero(c)}

    def letters_of(self, vector):
        """Inverse of :meth:`letter_vector`."""
        return {self.basis_word(1, j)[0]: c for j, c in vector.items()}

    def left_multiplication(self, coefficients, d):
        """Matrix of ``w -> u * w`` from R_d to R_{d+1} for ``u = sum(c * r_z)``."""
        coefficients = {z: self.field(c) for z, c in coefficients.items()}
        cols = self.dim(d)
        entries = {}
        for j in range(cols):
            word = self.basis_word(d, j)
            for z, c in coefficients.items():
                product = self.concat((z,), word)
                if product is None:
                    continue
                for i, v in self.reduce_word(product).items():
                    row = entries.setdefault(i, {})
                    row[j] = row.get(j, self.field.zero) + c * v
        return ExactMatrix.from_entries(entries, (self.dim(d + 1), cols), self.field)

    def leading_positions(self, d, letters):
        letters = set(letters)
        component = self.component(d)
        if component is None:
            return []
        return [j for j, w in enumerate(component.basis_words) if w and w[0] in letters]

    def r_space(self, n, k):
        """Quotient positions spanning R_Gamma(n, k): degree n-k+1, leading rank n+1."""
        return self.leading_positions(n - k + 1, self.poset.level(n + 1))

    def r_subspace_dim(self, x, d):
        """dim r_x R_{d-1} = number of quotient basis words of degree d led by ``x``."""
        return len(self.leading_positions(d, [x]))


def covering_words(poset, d):
    if d == 0:
        return [()]
    words = [(x,) for x in poset.plus]
    for _ in range(d - 1):
        words = [w + (y,) for w in words for y in poset.lower_covers(w[-1]) if y != STAR]
    return sorted(words)


def relation_vectors(poset, words, index):
    """Padded relations c * x * (sum over x -> y) * s in the coordinates of ``words``."""
    triples = sorted({(w[:i], w[i], w[i + 2:]) for w in words for i in range(len(w) - 1)})
    relations = []
    for prefix, x, suffix in triples:
        vector = {}
        for y in poset.lower_covers(x):
            if y == STAR or (suffix and not poset.covers_pair(y, suffix[0])):
                continue
            vector[index[prefix + (x, y) + suffix]] = 1
        if vector:
            relations.append(vector)
    return relations


def build_graded(poset, field):
    components = []
    d = 0
    while True:
        words = covering_words(poset, d)
        if not words:
            break
        index = {w: i for i, w in enumerate(words)}
        relations = [{k: field(v) for k, v in r.items()} for r in relation_vectors(poset, words, index)]
        components.append(GradedComponent(d, words, relations, field))
        d += 1
    algebra = GradedAlgebra(poset, field, components)
    logger.debug(f"Built R_Gamma over {field}: Hilbert series {algebra.hilbert()}")
    return algebra


def hilbert_direct(poset, field, algebra=None):
    return (algebra or build_graded(poset, field)).hilbert()


def hilbert_via_cohomology(poset, field):
    """dim R_i = sum over rk(a) >= i of dim H~^{i-2}(Delta(Gamma_{a,i}))."""
    coefficients = [1]
    for i in range(1, poset.rank + 1):
        total = 0
        for a in poset.plus:
            if poset.rank_of(a) >= i:
                total += reduced_cohomology(poset.gamma_ai(a, i), field).at(i - 2)
        coefficients.append(total)
    while len(coefficients) > 1 and coefficients[-1] == 0:
        coefficients.pop()
    return tuple(coefficients)




@dataclass
class RComplex:
    k: int
    positions: tuple
    spaces: list
    maps: list
    dims: object

    def to_dict(self):
        return {"k": self.k, **self.dims.to_dict()}


def r_subcomplex(poset, k, field, algebra=None):
    """(R_Gamma(., k), d_Gamma) for n = k .. m."""
    m = poset.rank - 1
    if not 0 <= k <= m:
        raise OutOfRange(f"k={k} outside 0..{m}")
    algebra = algebra or build_graded(poset, field)
    d_gamma = {z: 1 for z in algebra.letters}
    positions = tuple(range(k, m + 1))
    spaces = [algebra.r_space(n, k) for n in positions]
    maps = []
    for offset, n in enumerate(positions[:-1]):
        full = algebra.left_multiplication(d_gamma, n - k + 1)
        maps.append(full.select(rows=spaces[offset + 1], cols=spaces[offset]))
    dims = cohomology_dims(maps, dims=[len(s) for s in spaces], start=k)
    return RComplex(k=k, positions=positions, spaces=spaces, maps=maps, dims=dims)




@dataclass
class AnnihilatorReport:
    W: tuple
    level: int
    rann_dims: dict
    L_dims: dict
    closed_form_dims: dict
    contained: bool
    closed_form_agrees: bool
    first_failure: int = None

    @property
    def equal(self):
        return self.first_failure is None

    def to_dict(self):
        return {
            "W": list(self.W),
            "level": self.level,
            "rann_dims": [self.rann_dims[d] for d in sorted(self.rann_dims)],
            "L_dims": [self.L_dims[d] for d in sorted(self.L_dims)],
            "equal": self.equal,
            "first_failure": self.first_failure,
            "closed_form_agrees": self.closed_form_agrees,
        }


def right_ideal_span(algebra, generators, d):
    """Degree-d part of the right ideal generated by degree-1 ``generators``."""
    vectors = []
    for q in generators:
        image = algebra.left_multiplication(algebra.letters_of(q), d - 1)
        vectors.extend(v for v in image.column_vectors() if v)
    return vectors


def rann_vs_L(poset, W, field, algebra=None):
    from services.criteria import simW_classes

    n = poset.level_of(W)
    W = tuple(sorted(W.members if hasattr(W, "members") else W))
    algebra = algebra or build_graded(poset, field)
    r_W = {s: 1 for s in W}
    top = algebra.top_degree

    rann = {}
    for d in range(1, top + 1):
        rann[d] = algebra.left_multiplication(r_W, d).kernel_basis().row_vectors()

    classes = simW_classes(poset, W)
    class_generators = [algebra.letter_vector({z: 1 for z in c}) for c in classes]

    rann_dims, L_dims, closed_dims = {}, {}, {}
    contained = agrees = True
    first_failure = None
    for d in range(1, top + 1):
        size = algebra.dim(d)
        ideal = right_ideal_span(algebra, rann[1], d)
        closed = right_ideal_span(algebra, class_generators, d)
        rann_dims[d] = len(rann[d])
        L_dims[d] = span_rank(ideal, size, field)
        closed_dims[d] = span_rank(closed, size, field)
        if span_rank(ideal + closed, size, field) != L_dims[d] or closed_dims[d] != L_dims[d]:
            agrees = False
        if span_rank(ideal + rann[d], size, field) != rann_dims[d]:
            contained = False
        if L_dims[d] != rann_dims[d] and first_failure is None:
            first_failure = d

    if not agrees or not contained:
        logger.warning(f"Annihilator bookkeeping mismatch for W={W}: agrees={agrees}, contained={contained}")
    return AnnihilatorReport(
        W=W,
        level=n,
        rann_dims=rann_dims,
        L_dims=L_dims,
        closed_form_dims=closed_dims,
        contained=contained,
        closed_form_agrees=agrees,
        first_failure=first_failure,
    )


@dataclass
class KoszulVerdict(Verdict):
    reports: list = dc_field(default_factory=list)

    def to_dict(self):
        return {
            "holds": self.holds,
            "witnesses": [{"x": x, "W": list(W), "degree": d} for x, W, d in self.witnesses],
            "checked": len(self.reports),
        }


def t_family(poset):
    """The union of T(Gamma_y) over y in Gamma_+, each W with the first y producing it."""
    from services.criteria import tm_sets

    origin = {}
    for y in poset.plus:
        family = tm_sets(poset.principal_ideal(y))
        for W in family.all_T():
            origin.setdefault(tuple(W.sorted()), y)
    return sorted(origin.items(), key=lambda item: (poset.rank_of(item[0][0]), item[0]))


def koszul_decide(poset, field, algebra=None):
    """Koszulity through right annihilators of every W in the T-family."""
    if not poset.is_cyclic():
        verdict = KoszulVerdict(True)
        for x in poset.maximal_elements:
            sub = koszul_decide(poset.principal_ideal(x), field)
            verdict.reports.extend(sub.reports)
            verdict.witnesses.extend((x, W, d) for _, W, d in sub.witnesses)
        verdict.holds = not verdict.witnesses
        return verdict

    algebra = algebra or build_graded(poset, field)
    verdict = KoszulVerdict(True)
    for W, y in t_family(poset):
        report = rann_vs_L(poset, W, field, algebra)
        verdict.reports.append(report)
        if not report.equal:
            verdict.witnesses.append((y, W, report.first_failure))
    verdict.holds = not verdict.witnesses
    if verdict.witnesses:
        logger.info(f"R_Gamma is not Koszul over {field}: {len(verdict.witnesses)} failing level sets")
    return verdict


def strong_ideal_check(poset, field, algebra=None):
    """dim R_d = sum over x of dim r_x R_{d-1}, for every d >= 1."""
    algebra = algebra or build_graded(poset, field)
    table = {}
    holds = True
    for d in range(1, len(algebra.components)):
        parts = {x: algebra.left_multiplication({x: 1}, d - 1).rank() for x in algebra.letters}
        table[d] = (algebra.dim(d), parts)
        if sum(parts.values()) != algebra.dim(d):
            holds = False
    return Verdict(holds, [(d, dim, sum(p.values())) for d, (dim, p) in table.items() if dim != sum(p.values())])




class FreeModule:
    """Graded free right module sum(e_g R) with generators in the given degrees."""

    def __init__(self, algebra, degrees):
        self.algebra = algebra
        self.degrees = list(degrees)
        self._basis = {}

    def basis(self, t):
        if t not in self._basis:
            self._basis[t] = [
                (g, j)
                for g, deg in enumerate(self.degrees)
                for j in range(self.algebra.dim(t - deg))
            ]
        return self._basis[t]

    def index(self, t):
        return {b: i for i, b in enumerate(self.basis(t))}

    def times_word(self, vector, word):
        """``vector * word``; both sides are {(g, j): c} tagged with their degree."""
        field = self.algebra.field
        out = GradedVector(vector.degree + len(word))
        for (g, j), c in vector.items():
            left = self.algebra.basis_word(vector.degree - self.degrees[g], j)
            product = self.algebra.concat(left, word)
            if product is None:
                continue
            for k, v in self.algebra.reduce_word(product).items():
                out[(g, k)] = out.get((g, k), field.zero) + c * v
        for key in [key for key, c in out.items() if field.is_zero(c)]:
            del out[key]
        return out


class GradedVector(dict):
    """Sparse element of a free module, tagged with its internal degree."""

    def __init__(self, degree, entries=()):
        super().__init__(entries)
        self.degree = degree


@dataclass
class BettiTable:
    bound: int
    betti: dict

    @property
    def linear(self):
        return all(j == i for (i, j), b in self.betti.items() if b)

    def to_dict(self):
        return {
            "bound": self.bound,
            "betti": [[i, j, b] for (i, j), b in sorted(self.betti.items()) if b],
            "linear": self.linear,
        }


def ext_prefix(poset, field, bound=None, cap=20000, algebra=None):
    """Betti numbers of a minimal graded free resolution of the trivial right module."""
    algebra = algebra or build_graded(poset, field)
    bound = poset.rank + 1 if bound is None else bound
    if bound < 1:
        raise OutOfRange(f"Homological bound must be at least 1, got {bound}")
    top = algebra.top_degree
    zero = field.zero

    betti = {(0, 0): 1}
    # P_1 -> P_0 = R sends e_z to r_z
    images = [
        GradedVector(1, {(0, j): c for j, c in algebra.reduce_word((z,)).items()})
        for z in algebra.letters
    ]
    degrees = [1] * len(images)
    target = FreeModule(algebra, [0])
    if degrees:
        betti[(1, 1)] = len(degrees)

    for step in range(1, bound):
        if not degrees:
            break
        source = FreeModule(algebra, degrees)
        new_degrees, new_images = [], []
        previous_kernel = []
        low = min(degrees)
        high = max(degrees) + top
        for t in range(low, high + 1):
            columns = source.basis(t)
            rows = target.index(t)
            if len(columns) > cap or len(rows) > cap:
                raise BoundTooLarge(step, t, max(len(columns), len(rows)), cap)
            entries = {}
            for col, (g, j) in enumerate(columns):
                word = algebra.basis_word(t - degrees[g], j)
                for key, c in target.times_word(images[g], word).items():
                    row = entries.setdefault(rows[key], {})
                    row[col] = row.get(col, zero) + c
            phi = ExactMatrix.from_entries(entries, (len(rows), len(columns)), field)
            kernel = phi.kernel_basis().row_vectors()

            echelon = EchelonBasis(field)
            col_index = source.index(t)
            for vec in previous_kernel:
                tagged = GradedVector(t - 1, {source.basis(t - 1)[i]: c for i, c in vec.items()})
                for z in algebra.letters:
                    shifted = source.times_word(tagged, (z,))
                    if shifted:
                        echelon.add({col_index[key]: c for key, c in shifted.items()})
            for vec in kernel:
                if echelon.add(vec):
                    new_degrees.append(t)
                    new_images.append(GradedVector(t, {columns[i]: c for i, c in vec.items()}))
                    betti[(step + 1, t)] = betti.get((step + 1, t), 0) + 1
            previous_kernel = kernel
        logger.debug(f"Resolution step {step + 1}: {len(new_degrees)} generators")
        target, degrees, images = source, new_degrees, new_images
    return BettiTable(bound=bound, betti=betti)
