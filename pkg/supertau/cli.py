import json
import logging
import os
import re
from datetime import datetime, timezone
from fractions import Fraction

import click

from supertau import create_engine
from supertau.models.diffpoly import DiffPoly
from supertau.models.errors import SupertauError, ValidationError
from supertau.models.generators import text_label
from supertau.models.report import Report
from supertau.utils import export
from supertau.utils.frobenius_flows import compute_delta, compute_phi, principal_flows, tau_cover_rules
from supertau.utils.frobenius_tables import FrobeniusTables, compute_h, compute_omega
from supertau.utils.kdv import kdv_R_table, kdv_flows, kdv_omega_phi
from supertau.utils.spec_import import try_load_spec
from supertau.utils.suites import SUITES, SuiteOptions, run_suite
from supertau.utils.virasoro import builtin_coefficients, kdv_coefficients

logger = logging.getLogger(__name__)

EXIT_FAILED = 1
EXIT_INVALID = 3

COMPUTE_TARGETS = ('h', 'omega', 'phi', 'delta', 'flows', 'kdv', 'virasoro', 'tau-cover')
KDV_NAMES = {1: 'u'}
ORDER_TOKEN = re.compile(r"^-?\d+(,-?\d+)*$")


def _emit(text, out):
    if out:
        with open(out, 'w') as f:
            f.write(text)
        click.echo(click.style(f"Wrote {out}", fg='green'), err=True)
    else:
        click.echo(text, nl=False)


def _labels(spec):
    return spec.field_names or None


def _index(alpha, p, single):
    return f"{p}" if single else f"{alpha},{p}"


def _flow_label(name, single):
    if name[0] == 't':
        return f"t^{{{_index(name[1], name[2], single)}}}"
    return f"tau_{name[1]}"


def _flow_entries(flows, targets, names, single):
    entries = []
    for name, flow in sorted(flows.items()):
        label = _flow_label(name, single)
        for gen in targets:
            entries.append((f"d{text_label(gen, names)}/d{label}", flow(DiffPoly.gen(gen))))
    return entries


def _kdv_entries(engine, target, pmax, kmax, orders):
    environment = {"pmax": pmax, "kmax": kmax}
    if target == 'virasoro':
        entries = []
        for m in orders:
            entries += _coefficient_entries(kdv_coefficients(m, pmax + 1))
        environment["orders"] = list(orders)
        return 'kdv.virasoro', entries, KDV_NAMES, environment
    cover = engine.kdv()
    if target == 'omega':
        omega, _ = kdv_omega_phi(cover, pmax, pmax)
        entries = [(f"Omega_{{{k};{n}}}", value) for (k, n), value in sorted(omega.items())]
    elif target == 'phi':
        _, phi_table = kdv_omega_phi(cover, pmax, kmax)
        entries = [(f"Phi^{n}_{k}", value) for (k, n), value in sorted(phi_table.items())]
    elif target in ('flows', 'tau-cover'):
        flows = kdv_flows(cover, pmax, kmax)
        if target == 'flows':
            flows = {name: flow for name, flow in flows.items() if name[0] == 't'}
        entries = _flow_entries(flows, cover.targets(pmax, kmax), KDV_NAMES, True)
    else:
        raise click.UsageError(f"target '{target}' needs a Frobenius manifold, not kdv")
    return f"kdv.{target}", entries, KDV_NAMES, environment


def _compute_entries(engine, target, spec_name, pmax, kmax, orders):
    """(table name, entries, field names, environment) for one compute target."""
    if target == 'kdv':
        entries = [(f"R_{n}", value) for n, value in kdv_R_table(pmax + 2).items()]
        return 'kdv.R', entries, KDV_NAMES, {"pmax": pmax}
    if spec_name == 'kdv':
        return _kdv_entries(engine, target, pmax, kmax, orders)

    spec = engine.frobenius(spec_name)
    names = _labels(spec)
    single = spec.n == 1
    environment = {"spec": spec.name, "spec_hash": spec.hash, "pmax": pmax, "kmax": kmax}
    if target == 'h':
        table = compute_h(spec, pmax)
        entries = [(f"h_{{{_index(a, p, single)}}}", table[(a, p)])
                   for p in range(pmax + 1) for a in spec.fields]
        return f"{spec.name}.h", entries, names, environment
    if target == 'omega':
        table = compute_omega(spec, pmax)
        entries = [(f"Omega_{{{_index(a, p, single)};{_index(b, q, single)}}}", value)
                   for (a, p, b, q), value in sorted(table.items())]
        return f"{spec.name}.omega", entries, names, environment
    if target == 'virasoro':
        tables = FrobeniusTables(spec)
        entries = []
        for m in orders:
            entries += _coefficient_entries(builtin_coefficients(spec, m, pmax + 1, tables))
        environment["orders"] = list(orders)
        return f"{spec.name}.virasoro", entries, names, environment

    cover = engine.cover(spec_name)
    if target == 'phi':
        entries = [(f"Phi^{n}_{{{_index(a, p, single)}}}", value)
                   for (a, p, n), value in sorted(compute_phi(cover, pmax, kmax).items())]
    elif target == 'delta':
        entries = [(f"Delta^{{{k},{n}}}_{{{_index(a, p, single)}}}", value)
                   for (a, p, k, n), value in sorted(compute_delta(cover, pmax, kmax).items())]
    elif target == 'flows':
        entries = _flow_entries(principal_flows(cover, pmax), cover.targets(pmax, kmax), names, single)
    else:
        entries = _flow_entries(tau_cover_rules(cover, pmax, kmax), cover.targets(pmax, kmax), names, single)
    return f"{spec.name}.{target}", entries, names, environment


def _coefficient_entries(coeffs):
    m = coeffs.m
    entries = []
    for (left, right), value in sorted(coeffs.a.items()):
        entries.append((f"a_{m}^{{{left[0]},{left[1]};{right[0]},{right[1]}}}", DiffPoly.constant(value)))
    for (upper, lower), value in sorted(coeffs.b.items()):
        entries.append((f"b_{m}^{{{upper[0]},{upper[1]}}}_{{{lower[0]},{lower[1]}}}", DiffPoly.constant(value)))
    for (left, right), value in sorted(coeffs.c.items()):
        entries.append((f"c_{m}_{{{left[0]},{left[1]};{right[0]},{right[1]}}}", DiffPoly.constant(value)))
    if coeffs.const:
        entries.append((f"const_{m}", DiffPoly.constant(coeffs.const)))
    return entries


def _report_for(target, suite, results, options, engine, include_timestamp):
    report = Report(suite=f"{target}/{suite}", checks=results, environment=options.environment())
    if target in ('frobenius', 'virasoro') and suite != 'kdv':
        spec = engine.frobenius(options.spec)
        report.environment["spec_hash"] = spec.hash
    if include_timestamp:
        report.timestamp = datetime.now(timezone.utc).isoformat(timespec='seconds')
    return report.sort()


def _echo_summary(report):
    if report.passed:
        click.echo(click.style(f"{report.suite}: all {len(report.checks)} checks passed", fg='green'), err=True)
    else:
        click.echo(click.style(f"{report.suite}: {len(report.failures)} of {len(report.checks)} checks failed",
                               fg='red'), err=True)


def _run_and_report(ctx, target, suite, options, fmt, out, no_timestamp):
    engine = ctx.obj
    try:
        results = run_suite(engine, target, suite, options)
    except ValidationError as e:
        click.echo(click.style(f"Invalid spec: {e}", fg='red'), err=True)
        ctx.exit(EXIT_INVALID)
    except KeyError as e:
        raise click.UsageError(str(e))
    report = _report_for(target, suite or 'all', results, options, engine, not no_timestamp)
    _emit(export.render_report(report, fmt, not no_timestamp), out)
    _echo_summary(report)
    ctx.exit(report.exit_code)


def _parse_c0(value):
    if value in (None, 'symbolic'):
        return value
    try:
        Fraction(value)
    except ValueError:
        raise click.BadParameter(f"expected 'symbolic' or a rational, got {value}")
    return value


class OrdersOption(click.Option):
    """Repeatable integer option that also takes a run of values: --m -1 0 1."""

    def add_to_parser(self, parser, ctx):
        super().add_to_parser(parser, ctx)
        target = next(parser._long_opt.get(name) or parser._short_opt.get(name) for name in self.opts)
        process = target.process

        def greedy(value, state):
            values = [value]
            while state.rargs and ORDER_TOKEN.match(state.rargs[0]):
                values.append(state.rargs.pop(0))
            process(" ".join(values), state)

        target.process = greedy


def _parse_orders(ctx, param, values):
    orders = []
    for value in values:
        for token in value.replace(',', ' ').split():
            try:
                orders.append(int(token))
            except ValueError:
                raise click.BadParameter(f"expected integer Virasoro orders, got {token}")
    return tuple(orders)


def register_commands(cli):
    """Register the supertau commands on a click group."""

    output_options = [
        click.option('--format', 'fmt', type=click.Choice(export.FORMATS), default='text', show_default=True),
        click.option('--out', type=click.Path(dir_okay=False), default=None, help='Write to a file instead of stdout'),
    ]

    def with_output(func):
        for option in reversed(output_options):
            func = option(func)
        return func

    @cli.command('validate')
    @click.argument('spec')
    @click.pass_context
    def validate(ctx, spec):
        """Validate a Frobenius manifold spec (a path or a built-in name)."""
        loaded, results = try_load_spec(spec, ctx.obj.config['DATA_DIR'])
        for warning in results['warnings']:
            click.echo(click.style(f"Warning: {warning}", fg='yellow'))
        if results['critical_errors']:
            for error in results['critical_errors']:
                click.echo(click.style(f"Error: {error}", fg='red'))
            ctx.exit(EXIT_INVALID)
        click.echo(click.style(f"{loaded.name} is valid (sha256 {loaded.hash})", fg='green'))

    @cli.command('compute')
    @click.argument('target', type=click.Choice(COMPUTE_TARGETS))
    @click.option('--spec', default='onedim', show_default=True, help="Spec path, built-in name, or 'kdv'")
    @click.option('--pmax', type=int, default=None)
    @click.option('--kmax', type=int, default=None)
    @click.option('--m', 'orders', cls=OrdersOption, multiple=True, callback=_parse_orders, metavar='M...',
                  help='Virasoro orders: --m -1 0 1, --m -1,0,1 or repeated')
    @with_output
    @click.pass_context
    def compute(ctx, target, spec, pmax, kmax, orders, fmt, out):
        """Compute a table and print it."""
        engine = ctx.obj
        pmax = engine.config['PMAX'] if pmax is None else pmax
        kmax = engine.config['KMAX'] if kmax is None else kmax
        try:
            name, entries, names, environment = _compute_entries(
                engine, target, spec, pmax, kmax, orders or (-1, 0, 1))
        except ValidationError as e:
            click.echo(click.style(f"Invalid spec: {e}", fg='red'), err=True)
            ctx.exit(EXIT_INVALID)
        except SupertauError as e:
            click.echo(click.style(f"Error: {e}", fg='red'), err=True)
            ctx.exit(EXIT_FAILED)
        document = export.table_document(name, entries, names, environment)
        _emit(export.render_table(document, fmt), out)

    @cli.command('verify')
    @click.argument('target', type=click.Choice(sorted(SUITES)))
    @click.option('--suite', default='all', show_default=True)
    @click.option('--spec', default=None, help='Spec path or built-in name')
    @click.option('--pmax', type=int, default=None)
    @click.option('--kmax', type=int, default=None)
    @click.option('--P', 'P', type=int, default=None, help='Truncation of explicit t-times')
    @click.option('--K', 'K', type=int, default=None, help='Truncation of explicit tau-times')
    @click.option('--window', type=int, default=None, help='Series window')
    @click.option('--nmax', type=int, default=None)
    @click.option('--mmax', type=int, default=None)
    @click.option('--m', 'orders', cls=OrdersOption, multiple=True, callback=_parse_orders, metavar='M...',
                  help='Virasoro orders: --m -1 0 1, --m -1,0,1 or repeated')
    @click.option('--c0', default=None, help="'symbolic' or a rational")
    @click.option('--threads', type=int, default=None)
    @click.option('--cases', type=int, default=None, help='Random cases per property')
    @click.option('--no-timestamp', is_flag=True, default=False)
    @with_output
    @click.pass_context
    def verify(ctx, target, suite, spec, pmax, kmax, P, K, window, nmax, mmax, orders, c0, threads, cases,
               no_timestamp, fmt, out):
        """Run a verification suite; exit 1 when any check fails."""
        options = SuiteOptions.from_config(
            ctx.obj.config, spec=spec, pmax=pmax, kmax=kmax, P=P, K=K, window=window, nmax=nmax,
            mmax=mmax, orders=list(orders) or None, c0=_parse_c0(c0), threads=threads, cases=cases)
        _run_and_report(ctx, target, suite, options, fmt, out, no_timestamp)

    @cli.command('limit')
    @click.option('--pmax', type=int, default=None)
    @click.option('--kmax', type=int, default=None)
    @click.option('--m', 'orders', cls=OrdersOption, multiple=True, callback=_parse_orders, metavar='M...')
    @click.option('--c0', default=None)
    @click.option('--threads', type=int, default=None)
    @click.option('--no-timestamp', is_flag=True, default=False)
    @with_output
    @click.pass_context
    def limit(ctx, pmax, kmax, orders, c0, threads, no_timestamp, fmt, out):
        """Compare KdV at eps = 0 with the one-dimensional Frobenius cover."""
        options = SuiteOptions.from_config(ctx.obj.config, pmax=pmax, kmax=kmax, orders=list(orders) or None,
                                           c0=_parse_c0(c0), threads=threads)
        _run_and_report(ctx, 'limit', 'dispersionless', options, fmt, out, no_timestamp)

    @cli.command('export')
    @click.argument('document', type=click.Path(exists=True, dir_okay=False))
    @click.option('--no-timestamp', is_flag=True, default=False)
    @with_output
    @click.pass_context
    def export_document(ctx, document, no_timestamp, fmt, out):
        """Re-render a JSON table or report."""
        with open(document) as f:
            content = f.read()
        try:
            data = json.loads(content) if content.strip() else {}
        except json.JSONDecodeError as e:
            raise click.BadParameter(f"{document} is not valid JSON: {e}")
        _emit(export.render_document(data, fmt, not no_timestamp), out)


@click.group()
@click.option('--env', default=lambda: os.environ.get('SUPERTAU_ENV', 'development'),
              type=click.Choice(['development', 'testing', 'production', 'default']))
@click.option('--verbose', is_flag=True, default=False, help='Debug logging')
@click.pass_context
def cli(ctx, env, verbose):
    """Exact verification of super tau-covers."""
    engine = create_engine(env)
    level = logging.DEBUG if verbose else engine.config['LOG_LEVEL']
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')
    logging.getLogger('supertau').setLevel(level)
    ctx.obj = engine


register_commands(cli)
