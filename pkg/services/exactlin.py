"""Exact linear algebra over the rationals and prime fields.

Matrices are thin wrappers around sympy's sparse ``DomainMatrix`` so that every
rank, kernel and quotient is computed without floating point. Vectors that
travel between modules are sparse dicts ``{coordinate: field element}`` with
zero entries omitted.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from sympy import GF, QQ, isprime
from sympy.polys.matrices import DomainMatrix


logger = logging.getLogger(__name__)


class FieldError(ValueError):
    """Unknown field tag or a modulus that is not prime."""


class ShapeMismatch(ValueError):
    """Matrices that should compose do not have matching sizes."""


class CompositeNotZero(ValueError):
    """Two consecutive differentials of a complex compose to a nonzero map."""

    def __init__(self, position, message=None):
        self.position = position
        super().__init__(message or f"d{position + 1} o d{position} is not zero")


@lru_cache(maxsize=None)
def _domain(kind, p):
    if kind == "rational":
        return QQ
    return GF(p)


@dataclass(frozen=True)
class FieldSpec:
    kind: str
    p: int = None

    def __post_init__(self):
        if self.kind == "rational":
            if self.p is not None:
                raise FieldError("The rational field takes no modulus")
        elif self.kind == "prime":
            if not isinstance(self.p, int) or isinstance(self.p, bool) or self.p < 2 or not isprime(self.p):
                raise FieldError(f"{self.p!r} is not a prime modulus")
        else:
            raise FieldError(f"Unknown field kind {self.kind!r}")

    @classmethod
    def rational(cls):
        return cls("rational")

    @classmethod
    def prime(cls, p):
        return cls("prime", p)

    @classmethod
    def parse(cls, tag):
        """Read ``rational`` or ``gf:<p>``."""
        if isinstance(tag, FieldSpec):
            return tag
        text = str(tag).strip().lower()
        if text in ("rational", "qq", "q"):
            return cls.rational()
        if text.startswith("gf:"):
            modulus = text[3:]
            if not modulus.isdigit():
                raise FieldError(f"Field tag {tag!r} needs a numeric modulus, e.g. gf:2")
            return cls.prime(int(modulus))
        raise FieldError(f"Unknown field tag {tag!r}; use rational or gf:<p>")

    @property
    def tag(self):
        return "rational" if self.kind == "rational" else f"gf:{self.p}"

    @property
    def domain(self):
        return _domain(self.kind, self.p)

    @property
    def zero(self):
        return self.domain.zero

    @property
    def one(self):
        return self.domain.one

    def __call__(self, value):
        K = self.domain
        if isinstance(value, Fraction):
            return K(value.numerator) / K(value.denominator)
        if isinstance(value, int):
            return K(value)
        return K.convert(value)

    def is_zero(self, value):
        return self.domain.is_zero(value)

    def to_python(self, value):
        """Canonical plain value: ``int`` or ``Fraction`` in lowest terms, residues in [0, p)."""
        if self.kind == "prime":
            return int(value) % self.p
        frac = Fraction(int(value.numerator), int(value.denominator))
        return frac.numerator if frac.denominator == 1 else frac

    def __str__(self):
        return self.tag


class ExactMatrix:
    """A ``rows x cols`` matrix over a :class:`FieldSpec`, stored sparse."""

    def __init__(self, dm, field):
        self.dm = dm
        self.field = field

    @classmethod
    def from_entries(cls, entries, shape, field):
        """Build from ``{row: {col: value}}`` with plain or field values."""
        rows, cols = shape
        dod = {}
        for i, row in entries.items():
            if not 0 <= i < rows:
                raise ShapeMismatch(f"Row {i} outside a {rows}x{cols} matrix")
            clean = {}
            for j, value in row.items():
                if not 0 <= j < cols:
                    raise ShapeMismatch(f"Column {j} outside a {rows}x{cols} matrix")
                element = field(value)
                if not field.is_zero(element):
                    clean[j] = element
            if clean:
                dod[i] = clean
        return cls(DomainMatrix(dod, (rows, cols), field.domain), field)

    @classmethod
    def from_rows(cls, rows, field, cols=None):
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ShapeMismatch("Ragged rows")
        entries = {i: {j: v for j, v in enumerate(r) if v} for i, r in enumerate(rows)}
        return cls.from_entries(entries, (len(rows), cols), field)

    @classmethod
    def from_vectors(cls, vectors, length, field):
        """Stack sparse vectors as rows."""
        entries = {i: dict(v) for i, v in enumerate(vectors)}
        return cls.from_entries(entries, (len(entries), length), field)

    @classmethod
    def zeros(cls, rows, cols, field):
        return cls(DomainMatrix({}, (rows, cols), field.domain), field)

    @classmethod
    def identity(cls, n, field):
        return cls.from_entries({i: {i: 1} for i in range(n)}, (n, n), field)

    @property
    def shape(self):
        return self.dm.shape

    @property
    def rows(self):
        return self.dm.shape[0]

    @property
    def cols(self):
        return self.dm.shape[1]

    def entries(self):
        """``{row: {col: element}}`` without zeros."""
        sdm = self.dm.to_sparse().rep
        return {i: dict(row) for i, row in sdm.items() if row}

    def row_vectors(self):
        found = self.entries()
        return [found.get(i, {}) for i in range(self.rows)]

    def column_vectors(self):
        return self.transpose().row_vectors()

    def to_values(self):
        """Dense list of lists of canonical Python values."""
        dense = [[0] * self.cols for _ in range(self.rows)]
        for i, row in self.entries().items():
            for j, value in row.items():
                dense[i][j] = self.field.to_python(value)
        return dense

    def transpose(self):
        return ExactMatrix(self.dm.transpose(), self.field)

    def matmul(self, other):
        if self.cols != other.rows:
            raise ShapeMismatch(f"Cannot compose {self.shape} with {other.shape}")
        if self.cols == 0 or self.rows == 0 or other.cols == 0:
            return ExactMatrix.zeros(self.rows, other.cols, self.field)
        return ExactMatrix(self.dm.matmul(other.dm), self.field)

    def apply(self, vector):
        """Multiply a sparse column vector."""
        out = {}
        for i, row in self.entries().items():
            total = self.field.zero
            for j, value in row.items():
                if j in vector:
                    total += value * vector[j]
            if not self.field.is_zero(total):
                out[i] = total
        return out

    def select(self, rows=None, cols=None):
        row_index = list(range(self.rows)) if rows is None else list(rows)
        col_index = list(range(self.cols)) if cols is None else list(cols)
        row_pos = {r: i for i, r in enumerate(row_index)}
        col_pos = {c: j for j, c in enumerate(col_index)}
        picked = {}
        for r, row in self.entries().items():
            if r not in row_pos:
                continue
            kept = {col_pos[c]: v for c, v in row.items() if c in col_pos}
            if kept:
                picked[row_pos[r]] = kept
        return ExactMatrix(DomainMatrix(picked, (len(row_index), len(col_index)), self.field.domain), self.field)

    def scaled(self, factor):
        factor = self.field(factor)
        scaled = {i: {j: v * factor for j, v in row.items()} for i, row in self.entries().items()}
        return ExactMatrix.from_entries(scaled, self.shape, self.field)

    def is_zero(self):
        return not self.entries()

    def rref(self):
        """Reduced row echelon form and pivot columns."""
        if self.rows == 0 or self.cols == 0:
            return ExactMatrix.zeros(self.rows, self.cols, self.field), ()
        reduced, pivots = self.dm.to_sparse().rref()
        return ExactMatrix(reduced, self.field), tuple(int(c) for c in pivots)

    def rank(self):
        if self.is_zero():
            return 0
        return len(self.rref()[1])

    def kernel_basis(self):
        """Rows of the result span the right kernel, one per free column."""
        reduced, pivots = self.rref()
        pivot_rows = reduced.entries()
        free = [c for c in range(self.cols) if c not in set(pivots)]
        basis = {}
        for k, f in enumerate(free):
            vec = {f: self.field.one}
            for i, c in enumerate(pivots):
                value = pivot_rows.get(i, {}).get(f)
                if value is not None and not self.field.is_zero(value):
                    vec[c] = -value
            basis[k] = vec
        return ExactMatrix(DomainMatrix(basis, (len(free), self.cols), self.field.domain), self.field)

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and self.entries() == other.entries()

    def __repr__(self):
        return f"<ExactMatrix {self.rows}x{self.cols} over {self.field.tag}>"


def kernel_basis(matrix):
    return matrix.kernel_basis()


def rank(matrix):
    return matrix.rank()


@dataclass(frozen=True)
class ComplexDims:
    start: int
    dims: tuple
    cohomology: tuple

    @property
    def positions(self):
        return range(self.start, self.start + len(self.dims))

    def at(self, position):
        """Cohomology dimension at ``position``; zero outside the complex."""
        offset = position - self.start
        if 0 <= offset < len(self.cohomology):
            return self.cohomology[offset]
        return 0

    def euler_characteristic(self):
        return sum((-1) ** (self.start + i) * d for i, d in enumerate(self.dims))

    def cohomology_euler_characteristic(self):
        return sum((-1) ** (self.start + i) * h for i, h in enumerate(self.cohomology))

    def to_dict(self):
        return {
            "start": self.start,
            "dims": list(self.dims),
            "cohomology": list(self.cohomology),
        }


def cohomology_dims(differentials, dims=None, start=0):
    """Cohomology of ``C^start -> C^start+1 -> ...``.

    ``differentials[i]`` maps position ``start + i`` to ``start + i + 1`` and has
    shape ``(dim C^{i+1}, dim C^i)``. ``dims`` is only needed when there are no
    differentials.
    """
    differentials = list(differentials)
    if differentials:
        space_dims = [differentials[0].cols] + [d.rows for d in differentials]
        for i in range(len(differentials) - 1):
            if differentials[i + 1].cols != differentials[i].rows:
                raise ShapeMismatch(f"Differentials {i} and {i + 1} do not compose")
        if dims is not None and tuple(dims) != tuple(space_dims):
            raise ShapeMismatch(f"Declared dims {tuple(dims)} do not match {tuple(space_dims)}")
    else:
        space_dims = list(dims or ())

    for i in range(len(differentials) - 1):
        if not differentials[i + 1].matmul(differentials[i]).is_zero():
            raise CompositeNotZero(start + i)

    ranks = [d.rank() for d in differentials]
    cohomology = []
    for i, dim in enumerate(space_dims):
        outgoing = ranks[i] if i < len(ranks) else 0
        incoming = ranks[i - 1] if i >= 1 else 0
        cohomology.append(dim - outgoing - incoming)
    return ComplexDims(start=start, dims=tuple(space_dims), cohomology=tuple(cohomology))


def span_rank(vectors, length, field):
    vectors = [v for v in vectors if v]
    if not vectors:
        return 0
    return ExactMatrix.from_vectors(vectors, length, field).rank()


class Quotient:
    """``F^n`` modulo the span of ``relations``.

    The quotient basis is the set of non-pivot coordinates of the relation RREF.
    ``projection`` sends ambient coordinates to quotient coordinates.
    """

    def __init__(self, length, relations, field):
        self.length = length
        self.field = field
        relations = [r for r in relations if r]
        if relations:
            reduced, pivots = ExactMatrix.from_vectors(relations, length, field).rref()
            reduced_rows = reduced.entries()
        else:
            pivots, reduced_rows = (), {}
        self.pivots = pivots
        pivot_set = set(pivots)
        self.basis_positions = tuple(c for c in range(length) if c not in pivot_set)
        self._slot = {c: j for j, c in enumerate(self.basis_positions)}

        # column image of each ambient coordinate in quotient coordinates
        self._image = {c: {j: field.one} for c, j in self._slot.items()}
        for i, c in enumerate(pivots):
            row = reduced_rows.get(i, {})
            self._image[c] = {self._slot[f]: -v for f, v in row.items() if f != c and f in self._slot}

    @property
    def dim(self):
        return len(self.basis_positions)

    def project(self, vector):
        out = {}
        for c, value in vector.items():
            for j, coeff in self._image[c].items():
                out[j] = out.get(j, self.field.zero) + coeff * value
        return {j: v for j, v in out.items() if not self.field.is_zero(v)}


class EchelonBasis:
    """Incrementally grown echelon basis of a subspace of ``F^length``.

    Vectors added with a ``label`` are tracked: :meth:`coordinates` expresses a
    vector in terms of the tracked vectors modulo the untracked ones.
    """

    def __init__(self, field, tracked=0):
        self.field = field
        self.tracked = tracked
        self._rows = []

    @property
    def rank(self):
        return len(self._rows)

    def _reduce(self, vector):
        residual = dict(vector)
        combo = {}
        for pivot, row, row_combo in self._rows:
            factor = residual.get(pivot)
            if factor is None:
                continue
            for c, v in row.items():
                updated = residual.get(c, self.field.zero) - factor * v
                if self.field.is_zero(updated):
                    residual.pop(c, None)
                else:
                    residual[c] = updated
            for label, v in row_combo.items():
                updated = combo.get(label, self.field.zero) + factor * v
                if self.field.is_zero(updated):
                    combo.pop(label, None)
                else:
                    combo[label] = updated
        return residual, combo

    def add(self, vector, label=None):
        """Add ``vector``; returns False when it is already in the span."""
        residual, combo = self._reduce(vector)
        if not residual:
            return False
        # row = vector - sum(factor * rows) so its tracked part is label - combo
        row_combo = {k: -v for k, v in combo.items()}
        if label is not None:
            row_combo[label] = row_combo.get(label, self.field.zero) + self.field.one
            row_combo = {k: v for k, v in row_combo.items() if not self.field.is_zero(v)}
        pivot = min(residual)
        scale = self.field.one / residual[pivot]
        row = {c: v * scale for c, v in residual.items()}
        row_combo = {k: v * scale for k, v in row_combo.items()}
        self._rows.append((pivot, row, row_combo))
        return True

    def coordinates(self, vector):
        residual, combo = self._reduce(vector)
        if residual:
            raise ValueError("Vector is not in the span")
        return combo
