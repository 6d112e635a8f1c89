from cli.base import OrliczCommand, float_list
from cli.output import CommandResult
from young_functions.domination import eventually_dominates


class Command(OrliczCommand):
    help = 'Certify eventual domination Phi1(x) <= Phi2(k x) for x >= x_bar over a probe range'

    def add_command_arguments(self, parser):
        parser.add_argument('--phi1', required=True, help='Dominated Young function')
        parser.add_argument('--phi2', required=True, help='Dominating Young function')
        parser.add_argument('--k-grid', type=float_list, default=None, help='Candidate scale factors k')
        parser.add_argument('--thresholds', type=float_list, default=None, help='Candidate thresholds x_bar')
        parser.add_argument('--x-max', type=float, default=1e6, help='Upper end of the probe range')
        parser.add_argument('--mutual', action='store_true', help='Also certify the reverse domination')

    def compute(self, options):
        phi_1, phi_2 = self.young(options['phi1']), self.young(options['phi2'])
        kwargs = {'k_grid': options['k_grid'], 'x_thresholds': options['thresholds'], 'x_max': options['x_max']}
        forward = eventually_dominates(phi_1, phi_2, **kwargs)
        payload = {'forward': forward.to_dict()}
        if options['mutual']:
            backward = eventually_dominates(phi_2, phi_1, **kwargs)
            payload['backward'] = backward.to_dict()
            payload['equivalent'] = forward.dominates and backward.dominates
        return CommandResult(payload=payload)
