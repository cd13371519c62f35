import json
import os

import pytest

from app import create_app
from services.exactlin import FieldSpec
from services.fixtures import fixture


os.environ['TESTING'] = 'True'




@pytest.fixture
def app():
    app = create_app({
        'TESTING': True,
        'POSET_FIELD': 'rational',
        'POSET_K_POLICY': 'derived',
        'POSET_JOBS': 1,
        'POSET_PROGRESS': False,
        'LOG_LEVEL': 'WARNING',
    })

    with app.app_context():
        yield app




@pytest.fixture
def runner(app):
    return app.test_cli_runner()




@pytest.fixture
def QQ():
    return FieldSpec.rational()


@pytest.fixture
def GF2():
    return FieldSpec.prime(2)


@pytest.fixture(params=['rational', 'gf:2'])
def any_field(request):
    return FieldSpec.parse(request.param)




@pytest.fixture
def chain3():
    return fixture('chain3')


@pytest.fixture
def diamond():
    return fixture('diamond')


@pytest.fixture
def pinch():
    return fixture('pinch')


@pytest.fixture
def cycle4():
    return fixture('cycle4')


@pytest.fixture
def hexring():
    return fixture('hexring')


@pytest.fixture
def wedge():
    return fixture('wedge')




@pytest.fixture
def write_document(tmp_path):
    def write(doc, name='poset.json'):
        path = tmp_path / name
        text = doc if isinstance(doc, str) else json.dumps(doc)
        path.write_text(text, encoding='utf-8')
        return str(path)

    return write


@pytest.fixture
def cli_json(runner):
    """Invoke a CLI command; returns (exit code, parsed JSON output)."""
    def invoke(*args):
        result = runner.invoke(args=list(args))
        payload = json.loads(result.output) if result.output.strip().startswith('{') else None
        return result.exit_code, payload

    return invoke
