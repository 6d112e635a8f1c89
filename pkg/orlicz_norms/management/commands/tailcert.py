import numpy as np

from cli.base import OrliczCommand, float_list
from cli.output import CommandResult
from orlicz_norms.norms import tail_certificate


class Command(OrliczCommand):
    help = 'Check the sub-exponential tail bound gamma(|f| > t) <= 4 exp(-t / ||f||_cosh2) on a grid of t'

    def add_command_arguments(self, parser):
        parser.add_argument('--f', help='Field: preset name, number or expression JSON')
        parser.add_argument('--t-grid', type=float_list, default=list(np.linspace(0.5, 10.0, 20)),
                            help='Comma separated thresholds t (default 20 points in [0.5, 10])')
        parser.add_argument('--rho', type=float, help='Use this norm instead of computing it')

    def compute(self, options):
        f = self.field(options, 'f')
        certificate = tail_certificate(f, self.integrator(), options['t_grid'], rho=options['rho'])
        payload = certificate.to_dict()
        payload['f'] = f.describe()
        return CommandResult(
            payload=payload,
            table=certificate.table,
            verdict=None if certificate.finite else certificate.verdict,
        )
