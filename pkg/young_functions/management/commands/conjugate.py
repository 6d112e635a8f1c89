import numpy as np
import pandas as pd

from cli.base import OrliczCommand, float_list
from cli.output import CommandResult
from young_functions.young import check_young_legendre, conjugate


class Command(OrliczCommand):
    help = 'Conjugate a Young function and check the Young inequality and Legendre equality'

    def add_command_arguments(self, parser):
        parser.add_argument('--phi', required=True, help='Young function name, e.g. power:2, cosh2, exp2*, sq:cosh2')
        parser.add_argument('--x', default='0,0.5,1,2,5', type=float_list, help='Comma separated evaluation points')
        parser.add_argument('--y', default=None, type=float_list, help='Points paired with --x for the Young gap (default: same as --x)')

    def compute(self, options):
        phi = self.young(options['phi'])
        psi = conjugate(phi)
        xs = options['x']
        ys = options['y'] or xs
        if len(ys) != len(xs):
            ys = [ys[i % len(ys)] for i in range(len(xs))]

        rows = []
        for x, y in zip(xs, ys):
            report = check_young_legendre(phi, x, y, tol=self.tolerance)
            rows.append({
                'x': x,
                'y': y,
                'Phi': float(phi.Phi(x)),
                'phi': float(phi.phi(x)),
                'Psi': float(psi.Phi(x)),
                'psi': float(psi.phi(x)),
                'young_gap': report.young_gap,
                'legendre_residual': report.legendre_residual,
                'holds': report.holds,
            })
        table = pd.DataFrame(rows)

        back = conjugate(psi)
        grid = np.asarray(xs, dtype=float)
        double_error = float(np.max(np.abs(back.Phi(grid) - phi.Phi(grid)))) if len(grid) else 0.0

        return CommandResult(
            payload={
                'phi': phi.to_json(),
                'conjugate': psi.to_json(),
                'double_conjugation_error': double_error,
                'rows': table,
            },
            table=table,
        )
