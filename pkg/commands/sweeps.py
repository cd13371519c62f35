import logging

import click
from flask import Blueprint, current_app

from services.analysis import (
    exhaustive_candidates,
    random_candidates,
    search_witness,
    sweep,
    wedge_experiment,
)
from services.enumeration import EnumerationSpec, enumerate_cyclic
from utils import cli_errors, finish, parse_fields
from utils.report import emit
from commands.posets import field_option, k_policy_option, out_option


logger = logging.getLogger(__name__)

sweeps_bp = Blueprint('sweeps', __name__, cli_group=None)


def _spec(max_elements, max_rank, reject, fields=("rational",)):
    return EnumerationSpec(
        max_elements=max_elements,
        max_rank=max_rank,
        reject_isomorphs=reject,
        fields=tuple(f.tag for f in fields),
        canonical_limit=current_app.config['POSET_CANONICAL_LIMIT'],
        budget=current_app.config['POSET_ENUMERATION_BUDGET'],
    )




@sweeps_bp.cli.command('enumerate-verify')
@click.option('--max-elements', type=int, required=True, help='Bound on the number of elements, * included.')
@click.option('--max-rank', type=int, default=None)
@field_option
@click.option('--fields', 'field_list', default=None, help='Comma-separated fields, e.g. rational,gf:2.')
@k_policy_option
@click.option('--reject-isomorphs/--keep-isomorphs', default=True)
@click.option('--jobs', type=int, default=None, help='Worker processes (default from POSET_JOBS).')
@click.option('--ext/--no-ext', default=False)
@out_option
@cli_errors
def enumerate_verify_command(max_elements, max_rank, fields, field_list, k_policy, reject_isomorphs, jobs, ext, out):
    """Verify every cyclic poset up to the given size."""
    config = current_app.config
    chosen = parse_fields(tuple(fields) + ((field_list,) if field_list else ()))
    spec = _spec(max_elements, max_rank, reject_isomorphs, chosen)
    posets = list(enumerate_cyclic(spec))
    report = sweep(
        posets,
        chosen,
        spec=spec.to_dict(),
        k_policy=k_policy or config['POSET_K_POLICY'],
        jobs=jobs or config['POSET_JOBS'],
        progress=config['POSET_PROGRESS'],
        ext=ext,
        cap=config['POSET_EXT_CAP'],
    )
    emit(report.to_dict(), out)
    finish(report.ok)




@sweeps_bp.cli.command('search')
@click.argument('predicate')
@click.option('--max-elements', type=int, default=6)
@click.option('--max-rank', type=int, default=None)
@click.option('--random', 'samples', type=int, default=None, help='Sample this many random posets instead of enumerating.')
@click.option('--seed', type=int, default=0)
@click.option('--max-width', type=int, default=3, help='Largest level size for random samples.')
@field_option
@k_policy_option
@out_option
@cli_errors
def search_command(predicate, max_elements, max_rank, samples, seed, max_width, fields, k_policy, out):
    """First poset satisfying PREDICATE, e.g. 'weakly_cm & !uniform'."""
    field = parse_fields(fields)[0]
    if samples is not None:
        candidates = random_candidates(seed, samples, max_rank or 4, max_width)
    else:
        candidates = exhaustive_candidates(_spec(max_elements, max_rank, True, [field]))
    result = search_witness(
        predicate,
        candidates,
        field,
        k_policy=k_policy or current_app.config['POSET_K_POLICY'],
        progress=current_app.config['POSET_PROGRESS'],
    )
    if not result.found:
        logger.info(f"No witness for {result.predicate} among {result.examined} candidates")
    emit(result.to_dict(), out)




@sweeps_bp.cli.command('wedge-verify')
@click.option('--count', type=int, default=20)
@click.option('--seed', type=int, default=0)
@click.option('--max-rank', type=int, default=3)
@field_option
@k_policy_option
@out_option
@cli_errors
def wedge_verify_command(count, seed, max_rank, fields, k_policy, out):
    """Adjoined-top wedges of random Cohen-Macaulay pairs are weakly Cohen-Macaulay."""
    field = parse_fields(fields)[0]
    report = wedge_experiment(
        count, seed, field, max_rank=max_rank, k_policy=k_policy or current_app.config['POSET_K_POLICY'],
    )
    emit(report.to_dict(), out)
    finish(report.ok)
