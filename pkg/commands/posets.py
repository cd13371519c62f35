import logging

import click
from flask import Blueprint, current_app

from services.algebra import build_graded, ext_prefix, hilbert_via_cohomology, r_subcomplex
from services.analysis import SCHEMA, analyze, verify_poset
from services.criteria import K_POLICIES, s_complex
from services.topology import is_cm, is_cm_alt, reduced_cohomology, spectral_sequence
from utils import cli_errors, document_from_poset, finish, load_source, parse_fields
from utils.report import emit


logger = logging.getLogger(__name__)

posets_bp = Blueprint('posets', __name__, cli_group=None)


field_option = click.option(
    '--field', 'fields', multiple=True,
    help='rational or gf:<p>; repeatable, comma lists allowed.',
)
out_option = click.option('--out', type=click.Path(dir_okay=False), help='Write the report here instead of stdout.')
k_policy_option = click.option(
    '--k-policy', type=click.Choice(K_POLICIES), default=None,
    help='Range of k for the weakly Cohen-Macaulay test (default from POSET_K_POLICY).',
)


def _k_policy(value):
    return value or current_app.config['POSET_K_POLICY']


def _many(kind, reports):
    if len(reports) == 1:
        return reports[0]
    return {"schema": SCHEMA, "kind": kind, "reports": reports}




@posets_bp.cli.command('validate')
@click.argument('source')
@out_option
@cli_errors
def validate_command(source, out):
    """Check a poset document and print its canonical form."""
    poset, meta = load_source(source)
    emit({
        "schema": SCHEMA,
        "kind": "validation",
        "valid": True,
        "name": meta["name"],
        "rank": poset.rank,
        "elements": len(poset),
        "cyclic": poset.is_cyclic(),
        "pure": poset.is_pure(),
        "document": document_from_poset(poset, meta["name"], meta["field"]),
    }, out)




@posets_bp.cli.command('analyze')
@click.argument('source')
@field_option
@k_policy_option
@out_option
@cli_errors
def analyze_command(source, fields, k_policy, out):
    """Decide uniform, CM, weakly CM and Koszul, with Hilbert series and witnesses."""
    poset, meta = load_source(source)
    reports = [
        analyze(poset, field, meta["name"], _k_policy(k_policy))
        for field in parse_fields(fields, meta["field"])
    ]
    logger.info(f"Analyzed {meta['name']} over {len(reports)} field(s)")
    emit(_many("analysis-set", [r.to_dict() for r in reports]), out)
    finish(all(r.consistent for r in reports))




@posets_bp.cli.command('cohomology')
@click.argument('source')
@field_option
@click.option('--k', 'ks', type=int, multiple=True, help='Also print (R(., k), d) for these k.')
@out_option
@cli_errors
def cohomology_command(source, fields, ks, out):
    """Reduced cohomology of Delta(Gamma_+) and of every open interval."""
    poset, meta = load_source(source)
    reports = []
    for field in parse_fields(fields, meta["field"]):
        intervals = []
        for b in poset.elements:
            for a in sorted(poset.below_set(b), key=poset.sort_key):
                dims = reduced_cohomology(poset.open_interval(a, b), field)
                intervals.append({"a": a, "b": b, **dims.to_dict()})
        report = {
            "schema": SCHEMA,
            "kind": "cohomology",
            "name": meta["name"],
            "field": field.tag,
            "order_complex": reduced_cohomology(poset, field).to_dict(),
            "intervals": intervals,
        }
        if poset.rank >= 1:
            report["s_complex"] = s_complex(poset, poset.plus, field).to_dict()
        if poset.is_cyclic():
            report["cm"] = is_cm(poset, field).to_dict()
            report["cm_alt"] = is_cm_alt(poset, field).to_dict()
        if ks:
            algebra = build_graded(poset, field)
            report["r_complexes"] = [r_subcomplex(poset, k, field, algebra).to_dict() for k in ks]
        reports.append(report)
    emit(_many("cohomology-set", reports), out)




@posets_bp.cli.command('spectral')
@click.argument('source')
@field_option
@out_option
@cli_errors
def spectral_command(source, fields, out):
    """Pages of the rank-filtration spectral sequence of Delta(Gamma_+)."""
    poset, meta = load_source(source)
    reports = []
    for field in parse_fields(fields, meta["field"]):
        pages = spectral_sequence(poset, field)
        reports.append({
            "schema": SCHEMA,
            "kind": "spectral",
            "name": meta["name"],
            "field": field.tag,
            **pages.to_dict(),
            "ok": pages.ok,
        })
    emit(_many("spectral-set", reports), out)
    finish(all(r["ok"] for r in reports))




@posets_bp.cli.command('hilbert')
@click.argument('source')
@field_option
@click.option('--ext', 'bound', type=int, default=None, help='Also compute Betti numbers up to this homological degree.')
@out_option
@cli_errors
def hilbert_command(source, fields, bound, out):
    """Hilbert series of R_Gamma, directly and from interval cohomology."""
    poset, meta = load_source(source)
    reports = []
    for field in parse_fields(fields, meta["field"]):
        algebra = build_graded(poset, field)
        direct = algebra.hilbert()
        via = hilbert_via_cohomology(poset, field)
        report = {
            "schema": SCHEMA,
            "kind": "hilbert",
            "name": meta["name"],
            "field": field.tag,
            "direct": list(direct),
            "via_cohomology": list(via),
            "agree": direct == via,
        }
        if bound is not None:
            report["ext"] = ext_prefix(
                poset, field, bound, cap=current_app.config['POSET_EXT_CAP'], algebra=algebra,
            ).to_dict()
        reports.append(report)
    emit(_many("hilbert-set", reports), out)
    finish(all(r["agree"] for r in reports))




@posets_bp.cli.command('verify')
@click.argument('source')
@field_option
@k_policy_option
@click.option('--ext/--no-ext', default=False, help='Cross-check Koszulity against a resolution prefix.')
@out_option
@cli_errors
def verify_command(source, fields, k_policy, ext, out):
    """Run every decider and cross-check on one poset."""
    poset, meta = load_source(source)
    report = verify_poset(
        poset,
        parse_fields(fields, meta["field"]),
        name=meta["name"],
        k_policy=_k_policy(k_policy),
        ext=ext,
        cap=current_app.config['POSET_EXT_CAP'],
    )
    emit(report.to_dict(), out)
    finish(report.ok)
