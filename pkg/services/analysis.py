"""Reports that tie the deciders together: single-poset analysis and
verification, corpus sweeps, witness search and the wedge experiment."""
import logging
import multiprocessing
from dataclasses import dataclass, field as dc_field

from tqdm import tqdm

from models import PosetError
from services.algebra import (
    BoundTooLarge,
    build_graded,
    ext_prefix,
    hilbert_via_cohomology,
    koszul_decide,
    strong_ideal_check,
    t_family,
)
from services.criteria import (
    SComplex,
    abh_decomposition,
    bar_criterion,
    is_uniform,
    koszul_by_m_sets,
    linked_exactness_check,
    linked_split_check,
    psi_check,
    simW_classes,
    simW_classes_linear,
    tm_sets,
    verify_theorems,
    weakly_cm,
    window_cohomology_pair,
)
from services.enumeration import RandomSampler, canonical_poset, enumerate_cyclic
from services.exactlin import FieldSpec
from services.topology import is_cm, reduced_cohomology, spectral_sequence


logger = logging.getLogger(__name__)

SCHEMA = "poset-koszul-report/1"


def conventions(k_policy):
    return {
        "k_policy": k_policy,
        "layer_window_excludes_star": True,
        "m1_members_are_singletons": True,
        "psi_sign": "(-1)^(j(j-1)/2)",
    }


@dataclass
class AnalysisReport:
    name: str
    field: str
    cyclic: bool
    verdicts: dict
    hilbert: dict
    annihilators: list
    witnesses: dict
    conventions: dict
    consistency: dict

    @property
    def consistent(self):
        return self.consistency["consistent"]

    def to_dict(self):
        return {
            "schema": SCHEMA,
            "kind": "analysis",
            "name": self.name,
            "field": self.field,
            "cyclic": self.cyclic,
            "verdicts": dict(self.verdicts),
            "hilbert": dict(self.hilbert),
            "annihilators": list(self.annihilators),
            "witnesses": dict(self.witnesses),
            "conventions": dict(self.conventions),
            "consistency": dict(self.consistency),
        }


def analyze(poset, field, name="", k_policy="derived", algebra=None):
    field = FieldSpec.parse(field)
    algebra = algebra or build_graded(poset, field)
    consistency = verify_theorems(poset, field, k_policy, algebra)
    direct = algebra.hilbert()
    via = hilbert_via_cohomology(poset, field)
    koszul = consistency.koszul
    return AnalysisReport(
        name=name,
        field=field.tag,
        cyclic=poset.is_cyclic(),
        verdicts=dict(consistency.verdicts),
        hilbert={"direct": list(direct), "via_cohomology": list(via), "agree": direct == via},
        annihilators=[
            {"W": list(r.W), "level": r.level, "equal": r.equal, "first_failure": r.first_failure}
            for r in koszul.reports
        ],
        witnesses=dict(consistency.witnesses),
        conventions=conventions(k_policy),
        consistency=consistency.to_dict(),
    )




def _m_family(poset):
    """Every M-set of every principal ideal, once each."""
    found = {}
    for y in poset.plus:
        for W in tm_sets(poset.principal_ideal(y)).all_M():
            found.setdefault(W.members, W)
    return sorted(found, key=lambda members: [poset.sort_key(x) for x in sorted(members, key=poset.sort_key)])


def e1_diagonal_check(poset, field, pages=None):
    """S^n(Gamma_+) against E^1 at (m - n, 2n - m): dimensions and differential ranks."""
    pages = pages or spectral_sequence(poset, field)
    m = poset.rank - 1
    sc = SComplex(poset, poset.plus, field)
    for n in range(m + 1):
        if sc.dim(n) != pages.dim(1, m - n, 2 * n - m):
            return False
        if n < m:
            d1 = pages.differentials[1].get((m - n, 2 * n - m))
            d1_rank = d1.rank() if d1 is not None else 0
            if sc.maps[n].rank() != d1_rank:
                return False
    return True


def per_element_check(poset, k, field, algebra):
    """dim r_v R(rk v - 1, k) = dim H~ of the open part of Gamma_v above rank k, for each v above rank k."""
    for v in poset.plus:
        r = poset.rank_of(v)
        if r <= k:
            continue
        words = algebra.r_subspace_dim(v, r - k)
        lower = [w for w in poset.below_set(v) if poset.rank_of(w) > k]
        if words != reduced_cohomology(lower, field, poset=poset).at(r - k - 2):
            return False
    return True


@dataclass
class FieldVerification:
    field: str
    analysis: AnalysisReport
    checks: dict
    notes: dict = dc_field(default_factory=dict)

    @property
    def violations(self):
        found = [dict(v, field=self.field) for v in self.analysis.consistency["violations"]]
        found.extend(
            {"statement": name, "field": self.field}
            for name, ok in sorted(self.checks.items())
            if ok is False
        )
        return found

    def to_dict(self):
        return {
            "field": self.field,
            "analysis": self.analysis.to_dict(),
            "checks": dict(self.checks),
            "notes": dict(self.notes),
        }


def verify_field(poset, field, name="", k_policy="derived", ext=False, cap=20000):
    field = FieldSpec.parse(field)
    algebra = build_graded(poset, field)
    report = analyze(poset, field, name, k_policy, algebra)
    checks = {"hilbert_routes_agree": report.hilbert["agree"]}
    notes = {}

    if poset.rank >= 1:
        checks["psi_isomorphism"] = all(psi_check(poset, k, field, algebra).ok for k in range(poset.rank))
        pages = spectral_sequence(poset, field)
        checks["spectral_sequence"] = pages.ok
        if report.verdicts["cm"]:
            checks["e1_concentrated"] = pages.e1_concentrated()
        checks["s_complex_is_e1_diagonal"] = e1_diagonal_check(poset, field, pages)
        checks["per_element_dimensions"] = all(
            per_element_check(poset, k, field, algebra) for k in range(poset.rank)
        )
    checks["strong_ideal"] = strong_ideal_check(poset, field, algebra).holds

    t_sets = [frozenset(W) for W, _ in t_family(poset)]
    checks["simW_linear_agrees"] = all(
        simW_classes(poset, W) == simW_classes_linear(algebra, W) for W in t_sets
    )
    checks["abh_decomposition"] = all(abh_decomposition(poset, W, field, algebra).ok for W in t_sets)
    checks["linked_split"] = all(linked_split_check(poset, W, field, algebra) for W in t_sets)

    window_pairs = []
    for W in _m_family(poset):
        n = poset.level_of(W)
        for k in range(2, n):
            s_side, r_side = window_cohomology_pair(poset, W, k, field)
            window_pairs.append(s_side == r_side)
    checks["window_cohomology_pairs"] = all(window_pairs)

    notes["linked_exactness"] = all(linked_exactness_check(poset, W, field, algebra) for W in t_sets)
    if poset.is_cyclic():
        notes["m_set_conditions"] = koszul_by_m_sets(poset, field, algebra).to_dict()
        notes["weakly_cm_literal"] = weakly_cm(poset, field, "literal").holds

    if ext:
        try:
            betti = ext_prefix(poset, field, cap=cap, algebra=algebra)
        except BoundTooLarge as e:
            notes["ext_prefix"] = {"skipped": str(e)}
        else:
            notes["ext_prefix"] = betti.to_dict()
            checks["ext_prefix_matches_koszul"] = betti.linear == report.verdicts["koszul"]
    return FieldVerification(field=field.tag, analysis=report, checks=checks, notes=notes)


@dataclass
class VerificationReport:
    name: str
    fields: list

    @property
    def violations(self):
        return [v for f in self.fields for v in f.violations]

    @property
    def ok(self):
        return not self.violations

    def to_dict(self):
        return {
            "schema": SCHEMA,
            "kind": "verification",
            "name": self.name,
            "fields": [f.to_dict() for f in self.fields],
            "violations": self.violations,
            "ok": self.ok,
        }


def verify_poset(poset, fields, name="", k_policy="derived", ext=False, cap=20000):
    results = [verify_field(poset, f, name, k_policy, ext, cap) for f in fields]
    report = VerificationReport(name=name, fields=results)
    if not report.ok:
        logger.warning(f"{name or 'poset'}: {len(report.violations)} violation(s)")
    return report




def _poset_label(poset):
    return ";".join(f"{u}>{l}" for u, l in poset.covers if l != "*") or next(iter(poset.plus), "*")


def _sweep_task(task):
    poset, fields, k_policy, ext, cap = task
    report = verify_poset(poset, fields, k_policy=k_policy, ext=ext, cap=cap)
    label = _poset_label(poset)
    return {
        "label": label,
        "verdicts": {f.field: f.analysis.verdicts for f in report.fields},
        "violations": [dict(v, poset=label) for v in report.violations],
    }


@dataclass
class SweepReport:
    spec: dict
    posets: int
    verdict_counts: dict
    violations: list

    @property
    def ok(self):
        return not self.violations

    def to_dict(self):
        return {
            "schema": SCHEMA,
            "kind": "sweep",
            "spec": dict(self.spec),
            "posets": self.posets,
            "verdict_counts": dict(self.verdict_counts),
            "violations": list(self.violations),
            "ok": self.ok,
        }


def _run(tasks, jobs, progress, desc):
    if jobs > 1:
        with multiprocessing.get_context("spawn").Pool(processes=jobs) as pool:
            results = pool.imap(_sweep_task, tasks, chunksize=4)
            yield from tqdm(results, total=len(tasks), desc=desc, disable=not progress, ascii=True)
    else:
        for task in tqdm(tasks, desc=desc, disable=not progress, ascii=True):
            yield _sweep_task(task)


def sweep(posets, fields, spec=None, k_policy="derived", jobs=1, progress=False, ext=False, cap=20000):
    """Verify every poset; counts and sorted violations are independent of ``jobs``."""
    fields = [FieldSpec.parse(f).tag for f in fields]
    tasks = [(poset, fields, k_policy, ext, cap) for poset in posets]
    counts = {f: {"uniform": 0, "cm": 0, "weakly_cm": 0, "koszul": 0} for f in fields}
    violations = []
    for result in _run(tasks, jobs, progress, "verify"):
        for f, verdicts in result["verdicts"].items():
            for atom, holds in verdicts.items():
                counts[f][atom] += bool(holds)
        violations.extend(result["violations"])
    violations.sort(key=lambda v: (v["poset"], v["field"], v["statement"]))
    logger.info(f"Swept {len(tasks)} posets over {', '.join(fields)}: {len(violations)} violation(s)")
    return SweepReport(spec=spec or {}, posets=len(tasks), verdict_counts=counts, violations=violations)




ATOMS = ("uniform", "cm", "weakly_cm", "koszul")


class PredicateError(ValueError):
    pass


@dataclass(frozen=True)
class Predicate:
    """A conjunction of possibly negated verdict atoms, e.g. ``weakly_cm & !uniform``."""

    terms: tuple

    @classmethod
    def parse(cls, text):
        terms = []
        for raw in text.replace("∧", "&").replace(",", "&").split("&"):
            token = raw.strip()
            negated = False
            while token[:1] in ("!", "~", "¬"):
                negated = not negated
                token = token[1:].strip()
            if token.startswith("not "):
                negated, token = not negated, token[4:].strip()
            atom = token[5:] if token.startswith("dual_") else token
            if atom not in ATOMS:
                raise PredicateError(
                    f"Unknown atom {token!r}; use {', '.join(ATOMS)} or their dual_ forms, joined with &"
                )
            terms.append((token, not negated))
        if not terms:
            raise PredicateError("Empty predicate")
        return cls(tuple(terms))

    def __str__(self):
        return " & ".join(name if want else f"!{name}" for name, want in self.terms)


class VerdictCache:
    """Lazily computed verdict atoms for one poset and its dual."""

    def __init__(self, poset, field, k_policy):
        self.poset = poset
        self.field = field
        self.k_policy = k_policy
        self._values = {}
        self._dual = None

    def target(self, name):
        if not name.startswith("dual_"):
            return self.poset, name
        if self._dual is None:
            self._dual = self.poset.dual()
        return self._dual, name[5:]

    def __getitem__(self, name):
        if name not in self._values:
            poset, atom = self.target(name)
            if atom == "uniform":
                value = is_uniform(poset).holds
            elif atom == "cm":
                value = is_cm(poset, self.field).holds
            elif atom == "weakly_cm":
                value = weakly_cm(poset, self.field, self.k_policy).holds
            else:
                value = koszul_decide(poset, self.field).holds
            self._values[name] = value
        return self._values[name]

    def matches(self, predicate):
        return all(self[name] == want for name, want in predicate.terms)


@dataclass
class SearchResult:
    predicate: str
    examined: int
    poset: object = None
    report: AnalysisReport = None
    dual_report: AnalysisReport = None

    @property
    def found(self):
        return self.poset is not None

    def to_dict(self):
        return {
            "schema": SCHEMA,
            "kind": "search",
            "predicate": self.predicate,
            "examined": self.examined,
            "found": self.found,
            "witness": self.poset.to_dict() if self.found else None,
            "report": self.report.to_dict() if self.report else None,
            "dual_report": self.dual_report.to_dict() if self.dual_report else None,
        }


def search_witness(predicate, posets, field, k_policy="derived", progress=False):
    """First poset in ``posets`` satisfying ``predicate``, with its full report."""
    if isinstance(predicate, str):
        predicate = Predicate.parse(predicate)
    field = FieldSpec.parse(field)
    wants_dual = any(name.startswith("dual_") for name, _ in predicate.terms)
    examined = 0
    for poset in tqdm(posets, desc="search", disable=not progress, ascii=True):
        examined += 1
        try:
            if not VerdictCache(poset, field, k_policy).matches(predicate):
                continue
        except PosetError as e:
            logger.debug(f"Skipping candidate: {e}")
            continue
        report = analyze(poset, field, "witness", k_policy)
        dual_report = analyze(poset.dual(), field, "witness-dual", k_policy) if wants_dual else None
        logger.info(f"Found a witness for {predicate} after {examined} candidates")
        return SearchResult(str(predicate), examined, poset, report, dual_report)
    return SearchResult(str(predicate), examined)


def exhaustive_candidates(spec):
    return enumerate_cyclic(spec)


def random_candidates(seed, count, max_rank, max_width=3):
    sampler = RandomSampler(seed=seed, max_rank=max_rank, max_width=max_width)
    for _ in range(count):
        yield canonical_poset(sampler.sample())




@dataclass
class WedgeTrial:
    left: dict
    right: dict
    weakly_cm: bool
    criterion: bool

    @property
    def ok(self):
        return self.weakly_cm and self.criterion == self.weakly_cm

    def to_dict(self):
        return {
            "left": self.left,
            "right": self.right,
            "weakly_cm": self.weakly_cm,
            "criterion": self.criterion,
            "ok": self.ok,
        }


@dataclass
class WedgeReport:
    field: str
    seed: int
    trials: list

    @property
    def ok(self):
        return all(t.ok for t in self.trials)

    def to_dict(self):
        return {
            "schema": SCHEMA,
            "kind": "wedge",
            "field": self.field,
            "seed": self.seed,
            "trials": [t.to_dict() for t in self.trials],
            "ok": self.ok,
        }


def sample_cm(sampler, rank, field, attempts=1000):
    for _ in range(attempts):
        poset = sampler.sample(rank)
        if is_cm(poset, field):
            return poset
    raise PosetError(f"No Cohen-Macaulay poset of rank {rank} in {attempts} samples")


def wedge_experiment(count, seed, field, max_rank=3, max_width=2, k_policy="derived"):
    """Random CM pairs of equal rank: the adjoined-top wedge is weakly CM and the bar criterion agrees."""
    field = FieldSpec.parse(field)
    sampler = RandomSampler(seed=seed, max_rank=max_rank, max_width=max_width)
    trials = []
    for _ in range(count):
        rank = sampler.rng.randint(1, max_rank)
        left, right = sample_cm(sampler, rank, field), sample_cm(sampler, rank, field)
        glued = left.wedge(right)
        closure = glued.adjoin_top()
        holds = weakly_cm(closure, field, k_policy).holds
        trials.append(WedgeTrial(left.to_dict(), right.to_dict(), holds, bar_criterion(glued, field)))
    report = WedgeReport(field=field.tag, seed=seed, trials=trials)
    if not report.ok:
        logger.warning(f"Wedge experiment: {sum(not t.ok for t in trials)} failing trial(s)")
    return report
