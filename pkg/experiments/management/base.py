# experiments/management/base.py

import csv
import io
import logging

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from chains.domain import Config
from chains.exceptions import ChainError
from chains.utils import load_spec
from experiments.repository.repository import ExperimentRepository
from experiments.services.experiment_service import RunRecorder
from experiments.services.sweep import format_number
from experiments.utils import dumps

logger = logging.getLogger(__name__)

INVALID_CONFIG = 2
ASSERTION_FAILED = 3


def parse_config(text: str) -> Config:
    """`x0,x1` -> Config"""
    try:
        x0, x1 = (int(part) for part in text.split(','))
    except ValueError:
        raise CommandError(f"Expected x0,x1, got '{text}'", returncode=INVALID_CONFIG)
    if min(x0, x1) < 0:
        raise CommandError(f"Counts must be >= 0, got '{text}'", returncode=INVALID_CONFIG)
    return Config(x0, x1)


def parse_int_list(text: str) -> list:
    try:
        return [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise CommandError(f"Expected a comma-separated list of integers, got '{text}'", returncode=INVALID_CONFIG)


def parse_float_list(text: str) -> list:
    try:
        return [float(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise CommandError(f"Expected a comma-separated list of numbers, got '{text}'", returncode=INVALID_CONFIG)


class ExperimentCommand(BaseCommand):
    """
    Shared surface of the experiment commands: spec loading, output
    format, persistence and `--assert` checks.

    Subclasses implement `run(spec, options)` returning a JSON-ready dict,
    and optionally `table(payload)` (CSV header plus rows) and
    `check(payload, options)` (a list of failed assertions).
    """

    kind = None
    requires_spec = True

    def add_arguments(self, parser):
        parser.add_argument('--spec', type=str, required=self.requires_spec,
                            help='YAML spec file or inline key=val,key=val')
        parser.add_argument('--seed', type=int, default=None, help='Base seed (u64)')
        parser.add_argument('--trials', type=int, default=None, help='Trials (runs) per cell')
        parser.add_argument('--threads', type=int, default=None, help='Worker processes')
        parser.add_argument('--out', type=str, default=None, help='Write the result to this path')
        parser.add_argument('--format', choices=['csv', 'json'], default='json', help='Output format')
        parser.add_argument('--save', action='store_true', help='Store the result as an ExperimentRun')
        parser.add_argument('--assert', dest='assert_mode', action='store_true',
                            help='Exit with code 3 when the result fails its checks')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def run(self, spec, options) -> dict:
        raise NotImplementedError

    def table(self, payload):
        return None

    def check(self, payload, options) -> list:
        return []

    def lv(self, key):
        return settings.LV_CONSENSUS[key]

    def handle(self, *args, **options):
        if options['seed'] is None:
            options['seed'] = self.lv('DEFAULT_SEED')
        if options['threads'] is None:
            options['threads'] = self.lv('DEFAULT_THREADS')
        if not 0 <= options['seed'] < 2 ** 64:
            raise CommandError('--seed must be an unsigned 64-bit integer', returncode=INVALID_CONFIG)
        if options['threads'] < 1:
            raise CommandError('--threads must be >= 1', returncode=INVALID_CONFIG)

        try:
            spec = load_spec(options['spec']) if options.get('spec') else None
            payload = self.run(spec, options)
        except ValueError as exc:
            raise CommandError(str(exc), returncode=INVALID_CONFIG)
        except OSError as exc:
            raise CommandError(f"Cannot read input: {exc}", returncode=INVALID_CONFIG)
        except ChainError as exc:
            raise CommandError(f"{type(exc).__name__}: {exc}")

        self.emit(payload, options)

        if options['save']:
            run = RunRecorder(ExperimentRepository()).record(
                self.kind, spec, self.parameters(options), options['seed'], payload,
            )
            self.stderr.write(self.style.SUCCESS(f'Saved run {run.run_id}'))

        if options['assert_mode']:
            failures = self.check(payload, options)
            if failures:
                for failure in failures:
                    self.stderr.write(self.style.ERROR(failure))
                raise CommandError(f'{len(failures)} assertion(s) failed', returncode=ASSERTION_FAILED)
            self.stderr.write(self.style.SUCCESS('All assertions passed'))

    def parameters(self, options) -> dict:
        skip = {'spec', 'seed', 'out', 'format', 'save', 'assert_mode', 'verbosity', 'settings',
                'pythonpath', 'traceback', 'no_color', 'force_color', 'skip_checks', 'stdout', 'stderr'}
        return {key: value for key, value in options.items() if key not in skip}

    def render(self, payload, fmt) -> str:
        if fmt == 'json':
            return dumps(payload) + '\n'
        table = self.table(payload)
        if table is None:
            raise CommandError(f'{self.kind} has no CSV form; use --format json', returncode=INVALID_CONFIG)
        header, rows = table
        stream = io.StringIO()
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_number(value) for value in row])
        return stream.getvalue()

    def emit(self, payload, options):
        text = self.render(payload, options['format'])
        if options['out']:
            with open(options['out'], 'w', encoding='utf-8', newline='') as handle:
                handle.write(text)
            self.stderr.write(self.style.SUCCESS(f"Wrote {options['out']}"))
        else:
            self.stdout.write(text, ending='')
