from cli.base import OrliczCommand, int_list
from cli.output import CommandResult
from hermite_calculus.operators import expansion_table, partial
from hermite_calculus.series import as_multi_index, hermite, multi_factorial


class Command(OrliczCommand):
    help = 'Hermite polynomial H_alpha = delta^alpha 1: monomial and Hermite coefficients, derivatives, expansion table'

    def add_command_arguments(self, parser):
        parser.add_argument('--alpha', type=int_list, default=[2], help='Multi-index, e.g. 3 or 1,1 (default 2)')
        parser.add_argument('--f', help='Optional field whose expansion table is appended')
        parser.add_argument('--degree', type=int, default=6, help='Largest degree of the expansion table')

    def compute(self, options):
        dim = options['n'] or len(options['alpha'])
        alpha = as_multi_index(options['alpha'], dim)
        series = hermite(alpha)
        polynomial = series.to_polynomial()
        payload = {
            'alpha': list(alpha),
            'polynomial': [{'power': list(k), 'value': c} for k, c in polynomial.terms],
            'hermite': series.to_dict()['coefficients'],
            'norm_squared': multi_factorial(alpha),
            'partials': [partial(i, series).to_dict()['coefficients'] for i in range(dim)],
        }
        table = None
        if options['f']:
            f = self.field(options, 'f', dim)
            table = expansion_table(f, options['degree'], self.integrator(dim) if options['backend'] else None)
            payload['expansion'] = table
        return CommandResult(payload=payload, table=table)
