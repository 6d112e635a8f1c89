from cli.base import OrliczCommand, float_list
from cli.output import CommandResult
from exponential_manifold.family import DEFAULT_STEP, ExpFamily, cumulant_and_fisher, expectation_derivative_check


class Command(OrliczCommand):
    help = 'Fisher information of an exponential family: score covariance against the Hessian of kappa'

    def add_command_arguments(self, parser):
        parser.add_argument('--stats', nargs='+', help='Centered statistics u_1 .. u_d')
        parser.add_argument('--theta', type=float_list, help='Parameter vector, comma separated (default 0)')
        parser.add_argument('--step', type=float, default=DEFAULT_STEP, help='Finite-difference step (default 1e-3)')
        parser.add_argument('--f', help='Optional field whose expectation is differentiated in theta')

    def compute(self, options):
        stats = self.fields(options, 'stats')
        integrator = self.integrator(stats[0].dim)
        family = ExpFamily.create(stats, integrator)
        theta = options['theta'] if options['theta'] is not None else [0.0] * family.size
        report = cumulant_and_fisher(family, theta, integrator, options['step'])
        payload = report.to_dict()
        payload['stats'] = [u.describe() for u in stats]
        f = self.field(options, 'f', dim=family.dim, required=False)
        if f is not None:
            payload['expectation_derivative'] = expectation_derivative_check(
                family, theta, f, integrator, options['step']
            ).to_dict()
        return CommandResult(payload=payload)
