from cli.base import OrliczCommand
from cli.output import CommandResult
from exponential_manifold.geometry import log_sobolev_check
from exponential_manifold.model import ExpModelPoint


class Command(OrliczCommand):
    help = 'Log-Sobolev inequality E_gamma[p log p] <= 2 E_gamma[|grad sqrt p|^2] at p = exp(u - K1(u))'

    def add_command_arguments(self, parser):
        parser.add_argument('--u', help='Centered statistic of p')
        parser.add_argument('--auto-center', action='store_true', help='Center the statistic first')

    def compute(self, options):
        u = self.field(options, 'u')
        integrator = self.integrator(u.dim)
        p = ExpModelPoint.from_statistic(u, integrator, options['auto_center'])
        report = log_sobolev_check(p, integrator)
        payload = report.to_dict()
        payload['u'] = u.describe()
        payload['holds'] = report.holds(self.tolerance)
        return CommandResult(payload=payload)
