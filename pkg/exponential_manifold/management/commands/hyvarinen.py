from cli.base import OrliczCommand
from cli.output import CommandResult
from exponential_manifold.geometry import hyvarinen
from exponential_manifold.model import ExpModelPoint


class Command(OrliczCommand):
    help = "Hyvarinen divergence 1/2 E_gamma[|grad log p - grad log q|^2 p], reported in both directions"

    def add_command_arguments(self, parser):
        parser.add_argument('--up', help='Centered statistic of p')
        parser.add_argument('--uq', default='0', help='Centered statistic of q (default 0, the Gaussian)')
        parser.add_argument('--auto-center', action='store_true', help='Center both statistics first')

    def compute(self, options):
        up = self.field(options, 'up')
        uq = self.field(options, 'uq', dim=up.dim)
        integrator = self.integrator(up.dim)
        p = ExpModelPoint.from_statistic(up, integrator, options['auto_center'])
        q = ExpModelPoint.from_statistic(uq, integrator, options['auto_center'])
        forward, backward = hyvarinen(p, q, integrator), hyvarinen(q, p, integrator)
        payload = {
            'p': up.describe(),
            'q': uq.describe(),
            'p_to_q': forward.to_dict(),
            'q_to_p': backward.to_dict(),
            'symmetric': abs(forward.value - backward.value) <= self.tolerance,
        }
        return CommandResult(payload=payload)
