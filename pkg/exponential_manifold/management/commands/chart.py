import numpy as np

from cli.base import OrliczCommand
from cli.output import CommandResult
from exponential_manifold.model import chart, k1


class Command(OrliczCommand):
    help = 'Global chart u = log q - E_gamma[log q] of a density q with respect to gamma'

    def add_command_arguments(self, parser):
        parser.add_argument('--q', help='Strictly positive density with E_gamma[q] = 1')

    def compute(self, options):
        q = self.field(options, 'q')
        integrator = self.integrator(q.dim)
        u = chart(q, integrator)
        normalizer = k1(u, integrator)
        points, _ = integrator.nodes
        with np.errstate(divide='ignore', invalid='ignore'):
            residual = np.abs(u(points) - normalizer.value - np.log(q(points)))
        payload = {
            'q': q.describe(),
            'u': u.to_json(),
            'k1': normalizer.value,
            'round_trip_residual': float(np.max(residual[np.isfinite(residual)], initial=0.0)),
        }
        return CommandResult(payload=payload, verdict=None if normalizer.finite else normalizer.verdict)
