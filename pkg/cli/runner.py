"""
Entry point of the batch command-line surface.

    python -m cli norm --phi cosh2 --f x --n 1

run() dispatches to the Django management commands of the package and maps
their outcome to an exit code.
"""
import logging
import os
import sys
from contextlib import redirect_stderr, redirect_stdout

import django
from django.core.management import call_command
from django.core.management.base import CommandError

logger = logging.getLogger(__name__)

SUBCOMMANDS = (
    "norm", "dualnorm", "momentnorm", "tailcert", "class", "truncation",
    "conjugate", "domination", "hermite", "expand",
    "k1", "chart", "fisher", "hyvarinen", "otto", "logsob", "sphere", "portmanteau",
    "sobolev", "gen-fixtures",
)

# CLI names that are not valid Python module names
ALIASES = {
    "class": "orlicz_class",
    "gen-fixtures": "gen_fixtures",
}

USAGE = "usage: orlicz-ig <subcommand> [options]\n\nsubcommands: " + ", ".join(SUBCOMMANDS) + "\n"


def run(argv=None, stdout=None, stderr=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr

    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "orlicz_geometry.settings")
    django.setup()

    if not argv or argv[0] in ("-h", "--help", "help"):
        (stdout if argv else stderr).write(USAGE)
        return 0 if argv else 1

    name, rest = argv[0], argv[1:]
    if name not in SUBCOMMANDS:
        stderr.write(f'Unknown subcommand "{name}"\n{USAGE}')
        return 1

    try:
        # argparse writes --help to the process streams
        with redirect_stdout(stdout), redirect_stderr(stderr):
            call_command(ALIASES.get(name, name), *rest, stdout=stdout, stderr=stderr)
    except CommandError as exc:
        stderr.write(f"{exc}\n")
        return exc.returncode
    except SystemExit as exc:
        # argparse exits after --help
        return exc.code if isinstance(exc.code, int) else 0
    return 0


def main():
    sys.exit(run())
