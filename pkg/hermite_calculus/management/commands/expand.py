from cli.base import OrliczCommand
from cli.output import CommandResult
from hermite_calculus.operators import expand, expansion_table


class Command(OrliczCommand):
    help = 'Fourier-Hermite expansion c_alpha = E[f H_alpha] / alpha! with reconstruction error and Parseval sum'

    def add_command_arguments(self, parser):
        parser.add_argument('--f', help='Field: preset name, number or expression JSON')
        parser.add_argument('--degree', type=int, default=6, help='Largest total degree (default 6)')

    def compute(self, options):
        f = self.field(options, 'f')
        integrator = self.integrator() if options['backend'] else None
        result = expand(f, options['degree'], integrator)
        if not result.finite:
            return CommandResult(payload=result.to_dict(), verdict=result.verdict)
        payload = result.to_dict()
        payload['f'] = f.describe()
        payload['table'] = expansion_table(f, options['degree'], integrator)
        return CommandResult(payload=payload, table=payload['table'])
