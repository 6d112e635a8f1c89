from cli.base import OrliczCommand, float_list
from cli.output import CommandResult
from orlicz_norms.norms import truncation_convergence


class Command(OrliczCommand):
    help = 'Table of E[Phi(lambda (f - f_N))] for the truncations f_N = f 1(|x| <= N)'

    def add_command_arguments(self, parser):
        parser.add_argument('--f', help='Field: preset name, number or expression JSON')
        parser.add_argument('--phi', default='cosh2', help='Young function name (default cosh2)')
        parser.add_argument('--radii', type=float_list, default=[1.0, 2.0, 4.0, 8.0], help='Truncation radii N')
        parser.add_argument('--lam', type=float, default=1.0, help='Scale lambda (default 1)')

    def compute(self, options):
        f = self.field(options, 'f')
        phi = self.young(options['phi'])
        table = truncation_convergence(f, phi, self.integrator(), options['radii'], options['lam'])
        payload = {
            'f': f.describe(),
            'phi': phi.name,
            'lambda': options['lam'],
            'all_diverged': bool(table['diverged'].all()),
            'rows': table,
        }
        return CommandResult(payload=payload, table=table)
