import pandas as pd

from cli.base import OrliczCommand, float_list
from cli.output import CommandResult
from exponential_manifold.portmanteau import portmanteau_check


class Command(OrliczCommand):
    help = 'Portmanteau conditions for two strictly positive probability vectors on a finite set'

    def add_command_arguments(self, parser):
        parser.add_argument('--p', type=float_list, required=True, help='Probabilities, comma separated')
        parser.add_argument('--q', type=float_list, required=True, help='Probabilities, comma separated')
        parser.add_argument('--phi', default='cosh2', help='Young function of the compared norms (default cosh2)')

    def compute(self, options):
        report = portmanteau_check(options['p'], options['q'], self.young(options['phi']), self.config.seed)
        table = pd.DataFrame({'t': report.arc_grid, 'log_Z': report.log_partition})
        return CommandResult(payload=report.to_dict(), table=table)
