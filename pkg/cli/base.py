"""
Shared plumbing of the batch subcommands.

Every subcommand derives from OrliczCommand: it gets the common integrator,
config and output flags, and implements compute() returning a CommandResult.
Exit codes: 0 on success, 1 on usage errors, 2 on domain verdicts.
"""
import logging

from django.core.management.base import BaseCommand, CommandError

from core.exceptions import OrliczError
from gaussian_measure.expressions import field_from_json, parse_field
from gaussian_measure.integrators import BACKENDS
from young_functions.registry import young_function
from .config import resolve_run_config
from .output import CommandResult, render_csv, render_json

logger = logging.getLogger(__name__)

VERDICT_EXIT_CODE = 2


def float_list(text):
    """Comma separated floats, e.g. "0.1,0.2,0.5"."""
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).replace("[", "").replace("]", "").split(",") if v.strip()]


def int_list(text):
    return [int(v) for v in float_list(text)]


class OrliczCommand(BaseCommand):
    requires_system_checks = []
    output_formats = ("json", "csv")

    def add_arguments(self, parser):
        parser.add_argument("--n", type=int, help="Dimension of the Gaussian space (default 1)")
        parser.add_argument("--backend", choices=BACKENDS, help="Integrator backend")
        parser.add_argument("--order", type=int, help="Quadrature order per axis")
        parser.add_argument("--samples", type=int, help="Monte Carlo sample count")
        parser.add_argument("--seed", type=int, help="Monte Carlo seed")
        parser.add_argument("--config", help="Path to a JSON run configuration")
        parser.add_argument("--format", choices=self.output_formats, help="Output format (json or csv)")
        parser.add_argument("--tol", dest="tolerance", type=float, help="Tolerance for pass/fail checks")
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def compute(self, options) -> CommandResult:
        raise NotImplementedError

    # Helpers for subclasses

    def field(self, options, name, dim=None, required=True):
        spec = self.config.function_spec(name, options.get(name))
        if spec is None:
            if required:
                raise CommandError(f"Missing --{name.replace('_', '-')} (preset name or expression JSON)")
            return None
        return self._build(spec, dim)

    def fields(self, options, name, dim=None):
        """A list-valued flag (nargs="+") or config entry of fields."""
        specs = self.config.function_spec(name, options.get(name))
        if not specs:
            raise CommandError(f"Missing --{name.replace('_', '-')} (one or more fields)")
        if not isinstance(specs, (list, tuple)):
            specs = [specs]
        return [self._build(spec, dim) for spec in specs]

    def _build(self, spec, dim=None):
        dim = dim or self.config.n
        return parse_field(spec, dim) if isinstance(spec, str) else field_from_json(spec, dim)

    def integrator(self, dim=None, backend=None):
        return self.config.integrator(dim=dim, backend=backend)

    def young(self, name):
        return young_function(name)

    @property
    def tolerance(self):
        return self.config.effective_tolerance

    def handle(self, *args, **options):
        try:
            self.config = resolve_run_config(options)
            result = self.compute(options)
        except OrliczError as exc:
            logger.error(f"{type(exc).__name__}: {exc}")
            raise CommandError(f"{type(exc).__name__}: {exc}")

        if self.config.format == "csv":
            self.stdout.write(render_csv(result), ending="")
        else:
            self.stdout.write(render_json(result.payload))

        if result.verdict:
            logger.warning(f"Domain verdict: {result.verdict}")
            raise CommandError(result.verdict, returncode=VERDICT_EXIT_CODE)
