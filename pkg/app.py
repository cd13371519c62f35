# Flask App Factory
import logging
import os
import sys

import click
from dotenv import load_dotenv
from flask import Flask
from flask.cli import AppGroup, FlaskGroup


# Load environment variables
load_dotenv()


DEFAULTS = {
    'POSET_FIELD': 'rational',
    'POSET_K_POLICY': 'derived',
    'POSET_EXT_CAP': 20000,
    'POSET_JOBS': 1,
    'POSET_CANONICAL_LIMIT': 8,
    'POSET_ENUMERATION_BUDGET': 2_000_000,
    'POSET_PROGRESS': False,
    'LOG_LEVEL': 'INFO',
}


def _from_env(key, default):
    raw = os.environ.get(key)
    if raw is None:
        return default
    if isinstance(default, bool):
        return raw.strip().lower() in ('1', 'true', 'yes', 'on')
    if isinstance(default, int):
        return int(raw)
    return raw




class ExitCodes:
    """Usage errors exit with status 1; commands choose 0, 1 or 2 themselves."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            rv = super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
        except click.ClickException as e:
            e.show()
            rv = 1
        except click.Abort:
            click.echo('Aborted!', err=True)
            rv = 1
        code = rv if isinstance(rv, int) else 0
        if standalone_mode:
            sys.exit(code)
        return code


class PosetCommands(ExitCodes, AppGroup):
    pass


class PosetCLI(ExitCodes, FlaskGroup):
    pass




def create_app(config=None):
    app = Flask(__name__)

    # Configuration
    for key, default in DEFAULTS.items():
        app.config[key] = _from_env(key, default)

    # Override with provided config
    if config:
        app.config.update(config)

    logging.basicConfig(level=app.config['LOG_LEVEL'], stream=sys.stderr)
    logging.getLogger().setLevel(app.config['LOG_LEVEL'])

    app.cli = PosetCommands(name=app.name)

    # Register blueprints
    from commands.posets import posets_bp
    from commands.sweeps import sweeps_bp

    app.register_blueprint(posets_bp)
    app.register_blueprint(sweeps_bp)

    return app


cli = PosetCLI(create_app=create_app, add_default_commands=False)


if __name__ == '__main__':
    cli()
