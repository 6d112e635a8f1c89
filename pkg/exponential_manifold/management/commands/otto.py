from cli.base import OrliczCommand
from cli.output import CommandResult
from exponential_manifold.geometry import otto_inner
from exponential_manifold.model import ExpModelPoint


class Command(OrliczCommand):
    help = "Otto inner product E_gamma[grad f . grad g p] with its adjoint form E_gamma[f delta.grad(g p)]"

    def add_command_arguments(self, parser):
        parser.add_argument('--f', help='Differentiable field')
        parser.add_argument('--g', help='Differentiable field')
        parser.add_argument('--up', default='0', help='Centered statistic of the density p (default 0)')
        parser.add_argument('--auto-center', action='store_true', help='Center the statistic of p first')

    def compute(self, options):
        f = self.field(options, 'f')
        g = self.field(options, 'g', dim=f.dim)
        up = self.field(options, 'up', dim=f.dim)
        integrator = self.integrator(f.dim)
        p = ExpModelPoint.from_statistic(up, integrator, options['auto_center'])
        report = otto_inner(f, g, p, integrator, adjoint=p.u.differentiable)
        payload = report.to_dict()
        payload.update({'f': f.describe(), 'g': g.describe(), 'p': up.describe()})
        return CommandResult(payload=payload)
