"""Uniformity, ~^W classes, T/M level-set families, S-complexes, the map Psi
and the weakly Cohen-Macaulay decision, plus the cross-checks that tie the
combinatorial side to R_Gamma."""
import logging
from dataclasses import dataclass, field as dc_field

import networkx as nx

from models import STAR, EmptyArgument, OutOfRange, hasse_connected
from services.algebra import build_graded, koszul_decide, r_subcomplex, rann_vs_L, right_ideal_span
from services.exactlin import ExactMatrix, Quotient, cohomology_dims, span_rank
from services.topology import OrderComplex, Verdict, is_cm, is_cm_alt


logger = logging.getLogger(__name__)

K_POLICIES = ("derived", "literal")


class InconsistentVerdict(RuntimeError):
    """Two formulations of the same property disagree."""


def _subset_key(poset, members):
    return [poset.sort_key(x) for x in sorted(members, key=poset.sort_key)]


def _components(poset, nodes, edges):
    graph = nx.Graph()
    graph.add_nodes_from(nodes)
    graph.add_edges_from(edges)
    parts = [frozenset(c) for c in nx.connected_components(graph)]
    return sorted(parts, key=lambda c: _subset_key(poset, c))


def is_uniform(poset):
    """One ~_x class on the covers of every x; cross-checked against Gamma_{x,3} connectivity."""
    witnesses = []
    for x in poset.plus:
        covers = poset.lower_covers(x)
        edges = [
            (a, b)
            for i, a in enumerate(covers)
            for b in covers[i + 1:]
            if set(poset.lower_covers(a)) & set(poset.lower_covers(b))
        ]
        classes = _components(poset, covers, edges)
        single = len(classes) <= 1
        if poset.rank_of(x) >= 3 and hasse_connected(poset.gamma_ai(x, 3)) != single:
            raise InconsistentVerdict(f"~_x classes and Gamma_x,3 connectivity disagree at {x}")
        if not single:
            witnesses.append((x, [sorted(c) for c in classes]))
    return Verdict(not witnesses, witnesses)


def simW_classes(poset, W):
    """Partition of Gamma_+ into ~^W classes; elements untouched by W are singletons."""
    W = list(W.members) if hasattr(W, "members") else list(W)
    edges = []
    for s in W:
        covers = [c for c in poset.lower_covers(s) if c != STAR]
        edges.extend(zip(covers, covers[1:]))
    return _components(poset, poset.plus, edges)


def simW_classes_linear(algebra, W):
    """The same partition read off the kernel of r_W * : R_1 -> R_2."""
    r_W = {s: 1 for s in (W.members if hasattr(W, "members") else W)}
    kernel = algebra.left_multiplication(r_W, 1).kernel_basis().row_vectors()
    field = algebra.field
    signature = {}
    for j, word in enumerate(algebra.components[1].basis_words):
        key = tuple(field.to_python(vec.get(j, field.zero)) for vec in kernel)
        signature.setdefault(key, set()).add(word[0])
    return sorted((frozenset(c) for c in signature.values()), key=lambda c: _subset_key(algebra.poset, c))




@dataclass
class LevelSetFamily:
    T: dict
    M: dict

    def all_T(self):
        return [W for n in sorted(self.T, reverse=True) for W in self.T[n]]

    def all_M(self):
        return [W for n in sorted(self.M, reverse=True) for W in self.M[n]]

    def to_dict(self):
        return {
            "T": {str(n): [W.sorted() for W in self.T[n]] for n in sorted(self.T)},
            "M": {str(n): [W.sorted() for W in self.M[n]] for n in sorted(self.M)},
        }


def maximally_linked(poset, W):
    """Split a level set into its maximally linked pieces."""
    members = W.members if hasattr(W, "members") else frozenset(W)
    n = poset.level_of(members)
    if n == 1:
        return [frozenset({s}) for s in sorted(members)]
    window = poset.layer_window(members, 1)
    parts = _components(poset, window.members, window.induced_covers())
    return sorted((frozenset(p & members) for p in parts), key=lambda c: _subset_key(poset, c))


def tm_sets(poset):
    poset.require_cyclic()
    r = poset.rank
    if r == 0:
        return LevelSetFamily(T={}, M={})
    T = {r: [poset.subset({poset.top}, r)]}
    for i in range(r - 1, 0, -1):
        found = set()
        for W in T[i + 1]:
            class_of = {z: c for c in simW_classes(poset, W) for z in c}
            for s in W:
                found.update(class_of[z] for z in poset.lower_covers(s) if z != STAR)
        T[i] = [poset.subset(c, i) for c in sorted(found, key=lambda c: _subset_key(poset, c))]

    M = {}
    for n, family in T.items():
        pieces = set()
        for W in family:
            pieces.update(maximally_linked(poset, W))
        M[n] = [poset.subset(c, n) for c in sorted(pieces, key=lambda c: _subset_key(poset, c))]
    return LevelSetFamily(T=T, M=M)




class SComplex:
    """S^j = sum over layer-j elements x of C^{j-1}(lower(x)) modulo coboundaries."""

    def __init__(self, poset, members, field):
        self.poset = poset
        self.field = field
        self.members = sorted(set(members), key=poset.sort_key)
        if not self.members:
            raise EmptyArgument("The S-complex needs a non-empty base set")
        self.base_rank = poset.rank_of(self.members[0])
        self.height = poset.rank_of(self.members[-1]) - self.base_rank
        self.layers = [[x for x in self.members if self.layer(x) == j] for j in range(self.height + 1)]

        self.summands = {}
        self.relations = {}
        for x in self.members:
            j = self.layer(x)
            lower = [y for y in self.members if poset.less(y, x)]
            complex_ = OrderComplex(poset, lower)
            chains = complex_.chains(j - 1)
            if j == 0:
                relations = []
            else:
                relations = [v for v in complex_.coboundary(j - 2, field).column_vectors() if v]
            self.relations[x] = relations
            self.summands[x] = (chains, complex_.index(j - 1), Quotient(len(chains), relations, field))

        self.offsets = []
        for layer in self.layers:
            offset, table = 0, {}
            for x in layer:
                table[x] = offset
                offset += self.summands[x][2].dim
            self.offsets.append((table, offset))

        self.maps = [self._differential(j) for j in range(self.height)]
        self.dims = cohomology_dims(self.maps, dims=[size for _, size in self.offsets], start=0)

    def layer(self, x):
        return self.poset.rank_of(x) - self.base_rank

    def dim(self, j):
        return self.offsets[j][1] if 0 <= j <= self.height else 0

    def basis(self, j):
        """(x, representative chain) for every basis vector of S^j."""
        out = []
        for x in self.layers[j]:
            chains, _, quotient = self.summands[x]
            out.extend((x, chains[c]) for c in quotient.basis_positions)
        return out

    def _differential(self, j):
        sign = 1 if j % 2 == 0 else -1
        source_table, source_size = self.offsets[j]
        target_table, target_size = self.offsets[j + 1]
        member_set = set(self.members)
        entries = {}
        for x in self.layers[j]:
            chains, _, quotient = self.summands[x]
            for col_local, c in enumerate(quotient.basis_positions):
                col = source_table[x] + col_local
                for y in self.poset.upper_covers(x):
                    if y not in member_set:
                        continue
                    y_chains, y_index, y_quotient = self.summands[y]
                    extended = y_index[chains[c] + (x,)]
                    for row_local, v in y_quotient.project({extended: self.field.one}).items():
                        row = entries.setdefault(target_table[y] + row_local, {})
                        row[col] = row.get(col, self.field.zero) + sign * v
        return ExactMatrix.from_entries(entries, (target_size, source_size), self.field)

    def to_dict(self):
        return {"base_rank": self.base_rank, **self.dims.to_dict()}


def s_complex(poset, P, field):
    members = P.members if hasattr(P, "members") else P
    return SComplex(poset, members, field)




@dataclass
class PsiReport:
    label: str
    s_dims: tuple
    r_dims: tuple
    well_defined: bool
    commutes: bool
    bijective: bool
    raw_formula_commutes: bool

    @property
    def ok(self):
        return self.well_defined and self.commutes and self.bijective

    def to_dict(self):
        return {
            "label": self.label,
            "s_dims": list(self.s_dims),
            "r_dims": list(self.r_dims),
            "well_defined": self.well_defined,
            "commutes": self.commutes,
            "bijective": self.bijective,
            "raw_formula_commutes": self.raw_formula_commutes,
            "ok": self.ok,
        }


def _psi_sign(j):
    return -1 if (j * (j - 1) // 2) % 2 else 1


def _chain_word(x, chain):
    return (x,) + tuple(reversed(chain))


def psi_between(sc, algebra, label):
    """Check Psi: S^.(P) -> R(., .) given an S-complex and the algebra of a poset containing P."""
    field = algebra.field
    d_gamma = {z: 1 for z in algebra.letters}
    targets = [algebra.leading_positions(j + 1, sc.layers[j]) for j in range(sc.height + 1)]

    well_defined = True
    for x in sc.members:
        chains = sc.summands[x][0]
        for relation in sc.relations[x]:
            total = {}
            for c, coeff in relation.items():
                for k, v in algebra.reduce_word(_chain_word(x, chains[c])).items():
                    total[k] = total.get(k, field.zero) + coeff * v
            if any(not field.is_zero(v) for v in total.values()):
                well_defined = False

    psi = []
    for j in range(sc.height + 1):
        position = {p: i for i, p in enumerate(targets[j])}
        entries = {}
        for col, (x, chain) in enumerate(sc.basis(j)):
            for k, v in algebra.reduce_word(_chain_word(x, chain)).items():
                if k not in position:
                    well_defined = False
                    continue
                entries.setdefault(position[k], {})[col] = _psi_sign(j) * v
        psi.append(ExactMatrix.from_entries(entries, (len(targets[j]), sc.dim(j)), field))

    commutes = raw_commutes = True
    for j in range(sc.height):
        d_r = algebra.left_multiplication(d_gamma, j + 1).select(rows=targets[j + 1], cols=targets[j])
        left = psi[j + 1].matmul(sc.maps[j])
        right = d_r.matmul(psi[j])
        if left != right:
            commutes = False
        # the bare formula differs from the normalised map by the sign of each degree
        raw_left = left.scaled(_psi_sign(j + 1))
        raw_right = right.scaled(_psi_sign(j))
        if raw_left != raw_right:
            raw_commutes = False

    bijective = all(m.rows == m.cols and m.rank() == m.cols for m in psi)
    return PsiReport(
        label=label,
        s_dims=tuple(sc.dim(j) for j in range(sc.height + 1)),
        r_dims=tuple(len(t) for t in targets),
        well_defined=well_defined,
        commutes=commutes,
        bijective=bijective,
        raw_formula_commutes=raw_commutes,
    )


def psi_check(poset, k, field, algebra=None):
    """Psi on (Gamma^{>k})_+ against (R_Gamma(., k), d_Gamma)."""
    if not 0 <= k < poset.rank:
        raise OutOfRange(f"k={k} outside 0..{poset.rank - 1}")
    algebra = algebra or build_graded(poset, field)
    sc = SComplex(poset, [x for x in poset.plus if poset.rank_of(x) > k], field)
    return psi_between(sc, algebra, f"k={k}")


def psi_check_window(poset, W, k, field):
    """Psi on Gamma(W, k) against (R_{Gamma_W}(. + n-k-1, n-k-1), d_{Gamma_W})."""
    members = W.members if hasattr(W, "members") else frozenset(W)
    ideal = poset.below(members)
    window = poset.layer_window(members, k)
    sc = SComplex(ideal, window.members, field)
    return psi_between(sc, build_graded(ideal, field), f"W={sorted(members)},k={k}")




@dataclass
class WeakCMVerdict(Verdict):
    k_policy: str = "derived"
    checked: int = 0

    def to_dict(self):
        return {
            "holds": self.holds,
            "k_policy": self.k_policy,
            "checked": self.checked,
            "witnesses": [
                {"x": x, "n": n, "W": list(W), "k": k, "dim": dim} for x, n, W, k, dim in self.witnesses
            ],
        }


def k_range(policy, n):
    if policy == "derived":
        return range(2, n)
    if policy == "literal":
        return range(0, n)
    raise ValueError(f"Unknown k-policy {policy!r}; use one of {', '.join(K_POLICIES)}")


def weakly_cm(poset, field, k_policy="derived"):
    """H^{k-1}(S(Gamma(W, k))) = 0 for all x, n <= rk(x), W in M_n(Gamma_x), k in the policy range."""
    poset.require_cyclic()
    k_range(k_policy, 0)
    cache = {}
    verdict = WeakCMVerdict(True, k_policy=k_policy)
    for x in poset.plus:
        family = tm_sets(poset.principal_ideal(x))
        for n in range(1, poset.rank_of(x) + 1):
            for W in family.M.get(n, []):
                for k in k_range(k_policy, n):
                    key = (W.members, k)
                    if key not in cache:
                        window = poset.layer_window(W.members, k)
                        cache[key] = SComplex(poset, window.members, field).dims.at(k - 1)
                        verdict.checked += 1
                    if cache[key]:
                        verdict.witnesses.append((x, n, tuple(W.sorted()), k, cache[key]))
    verdict.holds = not verdict.witnesses
    return verdict


def window_cohomology_pair(poset, W, k, field):
    """Both sides of dim H^{k-1}(S(Gamma(W,k))) = dim H^{n-2}(R_{Gamma_W}(., n-k-1))."""
    n = poset.level_of(W)
    window = poset.layer_window(W, k)
    s_side = SComplex(poset, window.members, field).dims.at(k - 1)
    ideal = poset.below(W)
    r_side = r_subcomplex(ideal, n - k - 1, field).dims.at(n - 2)
    return s_side, r_side




@dataclass
class ABHReport:
    W: tuple
    L_dims: dict
    A_dims: dict
    B_dims: dict
    H_dims: dict

    @property
    def ok(self):
        return all(self.L_dims[d] == self.A_dims[d] + self.B_dims[d] + self.H_dims[d] for d in self.L_dims)


def abh_decomposition(poset, W, field, algebra=None):
    """Degree-wise dimensions of L(r_W) = A(r_W) + B(r_W) + H(n-1)."""
    algebra = algebra or build_graded(poset, field)
    members = frozenset(W.members if hasattr(W, "members") else W)
    n = poset.level_of(members)
    below_level = [z for z in poset.level(n - 1) if z != STAR]
    U = {u for u in below_level if any(poset.less(u, s) for s in members)}
    classes = [c for c in simW_classes(poset, members) if c <= U]
    generators = {
        "A": [algebra.letter_vector({z: 1 for z in c}) for c in classes],
        "B": [algebra.letter_vector({z: 1}) for z in below_level if z not in U],
        "H": [algebra.letter_vector({z: 1}) for z in algebra.letters if poset.rank_of(z) != n - 1],
    }
    report = rann_vs_L(poset, members, field, algebra)
    dims = {name: {} for name in generators}
    for d in report.L_dims:
        for name, gens in generators.items():
            dims[name][d] = span_rank(right_ideal_span(algebra, gens, d), algebra.dim(d), field)
    return ABHReport(tuple(sorted(members)), report.L_dims, dims["A"], dims["B"], dims["H"])


def linked_split_check(poset, W, field, algebra=None):
    """rann = L for W exactly when it holds for every maximally linked piece of W."""
    algebra = algebra or build_graded(poset, field)
    whole = rann_vs_L(poset, W, field, algebra).equal
    pieces = [rann_vs_L(poset, p, field, algebra).equal for p in maximally_linked(poset, W)]
    return whole == all(pieces)


def linked_exactness_check(poset, W, field, algebra=None):
    """For linked W: rann = L exactly when H^{n-2}(R_{Gamma_W}(., k)) = 0 for 0 <= k <= n-3."""
    members = frozenset(W.members if hasattr(W, "members") else W)
    n = poset.level_of(members)
    if n >= 2 and not hasse_connected(poset.layer_window(members, 1)):
        return True
    algebra = algebra or build_graded(poset, field)
    equal = rann_vs_L(poset, members, field, algebra).equal
    ideal = poset.below(members)
    exact = all(r_subcomplex(ideal, k, field).dims.at(n - 2) == 0 for k in range(0, n - 2))
    return equal == exact


@dataclass
class MSetConditions:
    annihilators: bool
    exactness: bool
    exactness_with_top: bool

    def to_dict(self):
        return {
            "annihilators_over_M": self.annihilators,
            "exactness_levels_below_top": self.exactness,
            "exactness_all_levels": self.exactness_with_top,
        }


def koszul_by_m_sets(poset, field, algebra=None):
    """Koszulity conditions phrased over M-sets: annihilators, and exactness with and without the top level."""
    poset.require_cyclic()
    algebra = algebra or build_graded(poset, field)
    annihilators = exactness = with_top = True
    seen = set()
    for y in poset.plus:
        ideal = poset.principal_ideal(y)
        m = ideal.rank - 1
        for W in tm_sets(ideal).all_M():
            n = poset.level_of(W.members)
            if W.members not in seen:
                seen.add(W.members)
                if not rann_vs_L(poset, W.members, field, algebra).equal:
                    annihilators = False
            if n < 2:
                continue
            below = poset.below(W.members)
            vanishes = all(r_subcomplex(below, k, field).dims.at(n - 2) == 0 for k in range(0, n - 2))
            if not vanishes:
                with_top = False
                if n <= m:
                    exactness = False
    return MSetConditions(annihilators, exactness, with_top)




@dataclass
class ConsistencyReport:
    cyclic: bool
    verdicts: dict
    witnesses: dict
    violations: list = dc_field(default_factory=list)
    koszul: object = dc_field(default=None, repr=False)

    @property
    def holds(self):
        return not self.violations

    def to_dict(self):
        return {
            "cyclic": self.cyclic,
            "verdicts": dict(self.verdicts),
            "witnesses": dict(self.witnesses),
            "violations": list(self.violations),
            "consistent": self.holds,
        }


def _biconditional(report, statement, left, right, details):
    if bool(left) != bool(right):
        report.violations.append({"statement": statement, "left": bool(left), "right": bool(right), "details": details})


def bar_criterion(poset, field):
    """All adjoined-top Gamma_W are CM, over W in M at the level just below the adjoined top.

    Returns None when the criterion does not apply (Gamma not pure, or some Gamma_x not CM).
    """
    if not poset.is_pure() or poset.rank < 1:
        return None
    if not all(is_cm(poset.principal_ideal(x), field) for x in poset.maximal_elements):
        return None
    closure = poset.adjoin_top()
    family = tm_sets(closure)
    return all(
        is_cm(closure.below(W.members).adjoin_top(), field)
        for W in family.M.get(closure.rank - 1, [])
    )


def verify_theorems(poset, field, k_policy="derived", algebra=None):
    """Evaluate every decider independently and report violated biconditionals."""
    uniform = is_uniform(poset)
    koszul = koszul_decide(poset, field, algebra)
    if poset.is_cyclic():
        cm = is_cm(poset, field)
        cm_alt = is_cm_alt(poset, field)
        wcm = weakly_cm(poset, field, k_policy)
        report = ConsistencyReport(
            cyclic=True,
            verdicts={"uniform": uniform.holds, "cm": cm.holds, "weakly_cm": wcm.holds, "koszul": koszul.holds},
            witnesses={
                "uniform": [[x, c] for x, c in uniform.witnesses],
                "cm": [list(w) for w in cm.witnesses],
                "weakly_cm": wcm.to_dict()["witnesses"],
                "koszul": koszul.to_dict()["witnesses"],
            },
        )
        _biconditional(report, "weakly_cm iff koszul", wcm, koszul, {"weakly_cm": wcm.to_dict()["witnesses"], "koszul": koszul.to_dict()["witnesses"]})
        _biconditional(report, "cm iff uniform and koszul", cm, uniform.holds and koszul.holds, {"cm": [list(w) for w in cm.witnesses]})
        _biconditional(report, "cm iff uniform and weakly_cm", cm, uniform.holds and wcm.holds, {"cm": [list(w) for w in cm.witnesses]})
        _biconditional(report, "cm agrees with the interval criterion", cm, cm_alt, {"alt": [list(w) for w in cm_alt.witnesses]})
        if poset.rank >= 2:
            criterion = bar_criterion(poset.drop_top(), field)
            if criterion is not None:
                _biconditional(report, "weakly_cm iff every adjoined-top Gamma_W is cm", wcm, criterion, {})
    else:
        maximal = poset.maximal_elements
        ideal_wcm = {x: weakly_cm(poset.principal_ideal(x), field, k_policy).holds for x in maximal}
        ideal_cm = {x: is_cm(poset.principal_ideal(x), field).holds for x in maximal}
        report = ConsistencyReport(
            cyclic=False,
            verdicts={
                "uniform": uniform.holds,
                "cm": all(ideal_cm.values()),
                "weakly_cm": all(ideal_wcm.values()),
                "koszul": koszul.holds,
            },
            witnesses={
                "uniform": [[x, c] for x, c in uniform.witnesses],
                "koszul": koszul.to_dict()["witnesses"],
                "weakly_cm": sorted(x for x, ok in ideal_wcm.items() if not ok),
                "cm": sorted(x for x, ok in ideal_cm.items() if not ok),
            },
        )
        _biconditional(report, "every principal ideal weakly_cm iff koszul", all(ideal_wcm.values()), koszul, {})
        _biconditional(report, "every principal ideal cm iff uniform and koszul", all(ideal_cm.values()), uniform.holds and koszul.holds, {})
        criterion = bar_criterion(poset, field)
        if criterion is not None:
            closure_wcm = weakly_cm(poset.adjoin_top(), field, k_policy)
            _biconditional(report, "adjoined-top weakly_cm iff every adjoined-top Gamma_W is cm", closure_wcm, criterion, {})

    if poset.rank <= 3 and not koszul.holds:
        report.violations.append({"statement": "rank at most three implies koszul", "left": True, "right": False, "details": koszul.to_dict()["witnesses"]})
    report.koszul = koszul
    if report.violations:
        logger.warning(f"{len(report.violations)} theorem violation(s) over {field}")
    return report
