from cli.base import OrliczCommand
from cli.output import CommandResult
from orlicz_norms.norms import luxemburg_norm


class Command(OrliczCommand):
    help = 'Luxemburg norm of a random field in the Orlicz space L^Phi(gamma)'

    def add_command_arguments(self, parser):
        parser.add_argument('--phi', default='cosh2', help='Young function name (default cosh2)')
        parser.add_argument('--f', help='Field: preset name, number or expression JSON')
        parser.add_argument('--weight', help='Optional density p; the norm is then taken under p*gamma')

    def compute(self, options):
        f = self.field(options, 'f')
        weight = self.field(options, 'weight', required=False)
        phi = self.young(options['phi'])
        result = luxemburg_norm(f, phi, self.integrator(), weight)
        payload = result.to_dict()
        payload.update({'phi': phi.name, 'f': f.describe()})
        return CommandResult(payload=payload, verdict=None if result.finite else result.verdict)
