import logging

import pandas as pd

from cli.base import OrliczCommand
from cli.output import CommandResult
from finite_oracle.fixtures import FIXTURE_TOLERANCE, generate_fixtures, summarize, write_fixtures

logger = logging.getLogger(__name__)


class Command(OrliczCommand):
    help = 'Regenerate the finite-space oracle fixtures (JSON files) deterministically from the seed'

    def add_command_arguments(self, parser):
        parser.add_argument('--output', default='fixtures', help='Directory receiving the fixture files (default ./fixtures)')

    def compute(self, options):
        seed = self.config.seed
        fixtures = generate_fixtures(seed)
        paths = write_fixtures(options['output'], fixtures=fixtures)
        logger.info(f"Wrote {len(paths)} fixtures to {options['output']}")
        table = pd.DataFrame({
            'file': [path.name for path in paths],
            'operation': [fixture['operation'] for fixture in fixtures],
        })
        payload = {
            'directory': str(options['output']),
            'count': len(paths),
            'operations': summarize(fixtures),
            'tolerance': FIXTURE_TOLERANCE,
            'files': [path.name for path in paths],
        }
        return CommandResult(payload=payload, table=table)
