from cli.base import OrliczCommand
from cli.output import CommandResult
from exponential_manifold.sphere import DIRECTIONS, as_bundle, fisher_routes, sphere_convert


class Command(OrliczCommand):
    help = 'Convert (point, velocity) between the sphere, bundle and tangent representations'

    def add_command_arguments(self, parser):
        parser.add_argument('--direction', choices=DIRECTIONS, required=True, help='Conversion to apply')
        parser.add_argument('--point', help='P on the sphere, or the density p')
        parser.add_argument('--velocity', help='Velocity in the source representation')
        parser.add_argument('--velocity2', help='Second velocity; the Fisher inner product is then compared across routes')

    def compute(self, options):
        point = self.field(options, 'point')
        velocity = self.field(options, 'velocity', dim=point.dim)
        integrator = self.integrator(point.dim)
        conversion = sphere_convert(options['direction'], point, velocity, integrator)
        payload = conversion.to_dict()
        second = self.field(options, 'velocity2', dim=point.dim, required=False)
        if second is not None:
            p, u1 = as_bundle(options['direction'], point, velocity)
            _, u2 = as_bundle(options['direction'], point, second)
            payload['fisher'] = fisher_routes(p, u1, u2, integrator).to_dict()
        return CommandResult(payload=payload)
