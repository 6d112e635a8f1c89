import pandas as pd
from django.core.management.base import CommandError

from core.exceptions import OrliczError
from cli.base import OrliczCommand, float_list
from cli.output import CommandResult, to_jsonable
from orlicz_norms.norms import DEFAULT_LAMBDAS, orlicz_class_member


class Command(OrliczCommand):
    help = 'Orlicz class membership: is E[exp(lambda |f|)] finite for every probed lambda?'

    def add_command_arguments(self, parser):
        parser.add_argument('--f', help='Field: preset name, number or expression JSON')
        parser.add_argument('--lambdas', type=float_list, default=list(DEFAULT_LAMBDAS),
                            help='Increasing, positive, comma separated lambda grid')

    def compute(self, options):
        f = self.field(options, 'f')
        try:
            report = orlicz_class_member(f, self.integrator(), options['lambdas'])
        except OrliczError:
            raise
        except ValueError as exc:
            raise CommandError(str(exc))
        table = pd.DataFrame([
            {'lambda': lam, 'diverged': 'diverged' in verdict, 'mgf': verdict.get('finite')}
            for lam, verdict in report.estimates
        ])
        payload = to_jsonable(report.to_dict())
        payload['f'] = f.describe()
        return CommandResult(payload=payload, table=table)
