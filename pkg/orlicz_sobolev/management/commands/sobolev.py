from django.core.management.base import CommandError

from cli.base import OrliczCommand, float_list
from cli.output import CommandResult
from orlicz_sobolev.composition import lipschitz_composition
from orlicz_sobolev.sobolev import (
    INCREMENT_ALPHAS,
    local_embedding_bound,
    sobolev_integrator,
    sobolev_membership,
    translation_increment_check,
)

CHECKS = ('membership', 'increment', 'chain', 'embedding')


class Command(OrliczCommand):
    help = 'Membership and calculus checks in the Gaussian Orlicz-Sobolev space W1 L(cosh2)'

    def add_command_arguments(self, parser):
        parser.add_argument('--check', choices=CHECKS, default='membership', help='Which check to run')
        parser.add_argument('--f', help='Field: preset name, number or expression JSON')
        parser.add_argument('--weight', help='Optional density p for membership in the fiber at p')
        parser.add_argument('--map', dest='map_name', help='Lipschitz scalar map for --check chain (relu, tanh, ...)')
        parser.add_argument('--h', type=float_list, help='Translation direction (default e1)')
        parser.add_argument('--t', type=float, default=0.1, help='Translation size (default 0.1)')
        parser.add_argument('--alphas', type=float_list, default=list(INCREMENT_ALPHAS), help='Exponents alpha')
        parser.add_argument('--rho', type=float, default=1.0, help='Ball radius for --check embedding')
        parser.add_argument('--k', type=int, default=1, help='Moment index k for --check embedding')

    def _integrator(self):
        if self.config.backend is None:
            return sobolev_integrator(self.config.n)
        return self.integrator()

    def compute(self, options):
        f = self.field(options, 'f')
        check = options['check']
        payload = {'check': check, 'f': f.describe()}
        if check == 'membership':
            weight = self.field(options, 'weight', required=False)
            report = sobolev_membership(f, self._integrator(), weight)
            payload.update(report.to_dict())
            return CommandResult(payload=payload, verdict=report.verdict)
        if check == 'increment':
            h = options['h'] or [1.0] + [0.0] * (f.dim - 1)
            report = translation_increment_check(f, h, options['t'], self.integrator(), options['alphas'])
            payload.update(report.to_dict())
            return CommandResult(payload=payload)
        if check == 'chain':
            if not options['map_name']:
                raise CommandError('--check chain needs --map')
            report = lipschitz_composition(options['map_name'], f, self._integrator())
            payload.update(report.to_dict())
            payload['chain_passed'] = report.chain_passed(self.tolerance)
            return CommandResult(payload=payload)
        report = local_embedding_bound(f, options['rho'], options['k'], self._integrator(), self.tolerance)
        payload.update({'rho': options['rho'], 'k': options['k']}, **report.to_dict())
        return CommandResult(payload=payload)
