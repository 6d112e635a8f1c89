import pandas as pd

from cli.base import OrliczCommand
from cli.output import CommandResult
from orlicz_norms.norms import moment_norm


class Command(OrliczCommand):
    help = 'Moment norm max_k ((2k)!^-1 E[f^2k])^(1/2k), a lower bound equivalent to the cosh2 norm'

    def add_command_arguments(self, parser):
        parser.add_argument('--f', help='Field: preset name, number or expression JSON')
        parser.add_argument('--k-max', type=int, help='Largest moment order k (default 20)')

    def compute(self, options):
        f = self.field(options, 'f')
        result = moment_norm(f, self.integrator(), options['k_max'])
        table = pd.DataFrame({'k': range(1, len(result.terms) + 1), 'term': result.terms})
        payload = result.to_dict()
        payload['f'] = f.describe()
        return CommandResult(payload=payload, table=table, verdict=None if result.finite else result.verdict)
