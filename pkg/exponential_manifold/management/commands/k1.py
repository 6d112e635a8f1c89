from cli.base import OrliczCommand
from cli.output import CommandResult
from exponential_manifold.model import k1


class Command(OrliczCommand):
    help = 'Cumulant K1(u) = log E_gamma[e^u] of a centered statistic, or the outside-domain verdict'

    def add_command_arguments(self, parser):
        parser.add_argument('--u', help='Centered field: preset name, number or expression JSON')
        parser.add_argument('--auto-center', action='store_true', help='Subtract E_gamma[u] before evaluating')

    def compute(self, options):
        u = self.field(options, 'u')
        result = k1(u, self.integrator(u.dim), auto_center=options['auto_center'])
        payload = result.to_dict()
        payload['u'] = u.describe()
        return CommandResult(payload=payload, verdict=None if result.finite else result.verdict)
