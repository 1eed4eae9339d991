"""Command-line entry point: ``fvmotion <command> ...``.

Every command writes one table (CSV or JSON) to stdout or ``--out``. Tables
start with a metadata header echoing the resolved configuration and the
toolkit version. Exit codes: 0 success, 1 failed acceptance checks, 2 usage
error, 3 domain error.
"""

import csv
import io
import json
import math
import sys

import click
import numpy as np

from . import __version__
from . import dirdep as dd
from . import eulergen as eg
from . import geo2d as g2
from . import planar as pl
from . import suite as st
from . import telegraph as tg
from . import timevar as tv
from . import velocitymap as vm
from .distributions import DomainError
from .mcharness import aux_stream
from .quadrature import QuadratureError
from .specfun import SpecialFunctionError

EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3

# stream keys per command, so that different commands never share draws
_STREAM = {"telegraph": 1, "motion1d": 2, "planar": 3, "dirdep": 4, "timevar": 5, "geo2d": 6}


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def fmt_number(x):
    """Round-trip text for a number: integers as such, floats with 17 digits."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def to_json(obj, indent=0, step=2):
    """Deterministic JSON with 17-significant-digit floats."""
    pad = " " * (indent + step)
    end = " " * indent
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (bool, np.bool_, int, float, np.integer, np.floating)):
        return fmt_number(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent + step, step)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(to_json(v) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + to_json(v, indent + step, step) for v in seq) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _meta(ctx):
    config = {}
    for c in reversed(list(_ctx_chain(ctx))):
        config.update({k: v for k, v in c.params.items() if k not in ("fmt", "out")})
    return {"tool": "fvmotion", "version": __version__, "command": ctx.command_path.split(" ", 1)[-1],
            "config": config}


def _ctx_chain(ctx):
    while ctx is not None:
        yield ctx
        ctx = ctx.parent


def emit(ctx, columns, rows, extra=None):
    """Write a table with its metadata header in the format chosen by the user."""
    fmt = _opt(ctx, "fmt") or "csv"
    out = _opt(ctx, "out")
    meta = _meta(ctx)
    if extra:
        meta.update(extra)
    if fmt == "json":
        body = {"meta": meta, "columns": list(columns), "rows": [list(r) for r in rows]}
        text = to_json(body) + "\n"
    else:
        buf = io.StringIO()
        buf.write("# " + to_json(meta, step=0).replace(",\n", ", ").replace("\n", "") + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([v if isinstance(v, str) else fmt_number(v) for v in r])
        text = buf.getvalue()
    write_text(text, out)


def write_text(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _opt(ctx, name):
    for c in _ctx_chain(ctx):
        if name in c.params and c.params[name] is not None:
            return c.params[name]
    return None


def output_options(f):
    f = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
                     show_default=True, help="Output format.")(f)
    f = click.option("--out", type=click.Path(dir_okay=False), default=None,
                     help="Write to this file instead of stdout.")(f)
    return f


def _rng(command, seed, *keys):
    return aux_stream(seed, _STREAM[command], *keys)


def _positive(ctx, param, value):
    if value is not None and not value > 0:
        raise click.BadParameter("must be positive")
    return value


CONTEXT = {"help_option_names": ["-h", "--help"]}


@click.group(context_settings=CONTEXT)
@click.version_option(__version__, prog_name="fvmotion")
def cli():
    """Finite-velocity random motions: exact laws and seeded simulation."""


# ---------------------------------------------------------------------------
# telegraph
# ---------------------------------------------------------------------------

def telegraph_options(f):
    f = click.option("--lambda", "lam", type=float, default=1.0, show_default=True,
                     callback=_positive, help="Switching rate.")(f)
    f = click.option("--c", type=float, default=1.0, show_default=True, callback=_positive,
                     help="Speed.")(f)
    f = click.option("--t", type=float, default=1.0, show_default=True, callback=_positive,
                     help="Time.")(f)
    return f


@cli.group()
def telegraph():
    """Standard telegraph process."""


@telegraph.command("sample")
@telegraph_options
@click.option("--replicas", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, required=True)
@output_options
@click.pass_context
def telegraph_sample(ctx, lam, c, t, replicas, seed, fmt, out):
    """Endpoints T(t) of independent paths."""
    x = tg.sample_endpoints(tg.TelegraphParams(lam, c), t, replicas, _rng("telegraph", seed))
    emit(ctx, ["T"], ([v] for v in x))


@telegraph.command("density")
@telegraph_options
@click.option("--grid", type=click.IntRange(min=1), default=101, show_default=True)
@output_options
@click.pass_context
def telegraph_density(ctx, lam, c, t, grid, fmt, out):
    """Continuous density on an open grid of the support."""
    P = tg.TelegraphParams(lam, c)
    ct = c * t
    z = np.linspace(-ct, ct, grid + 2)[1:-1]
    f = tg.density(P, z, t)
    emit(ctx, ["z", "f"], zip(z, f), {"atom_mass": tg.atom_mass(P, t)})


@telegraph.command("moments")
@telegraph_options
@click.option("--n", type=click.IntRange(0, 30), default=5, show_default=True,
              help="Highest half-order 2n.")
@output_options
@click.pass_context
def telegraph_moments(ctx, lam, c, t, n, fmt, out):
    """Even moments E[T(t)^(2k)] for k = 0..n."""
    P = tg.TelegraphParams(lam, c)
    emit(ctx, ["order", "moment"], ((2 * k, tg.moment_even(P, k, t)) for k in range(n + 1)))


@telegraph.command("cdf")
@telegraph_options
@click.option("--grid", type=click.IntRange(min=2), default=101, show_default=True)
@output_options
@click.pass_context
def telegraph_cdf(ctx, lam, c, t, grid, fmt, out):
    """Right-continuous CDF on a closed grid of the support."""
    P = tg.TelegraphParams(lam, c)
    z = np.linspace(-c * t, c * t, grid)
    emit(ctx, ["z", "F"], zip(z, tg.law(P, t).cdf(z)))


# ---------------------------------------------------------------------------
# motion1d
# ---------------------------------------------------------------------------

def _model(family, c, x0, alpha, variant):
    if family == "constant":
        return vm.constant(c, 0.0 if x0 is None else x0)
    if family == "linear":
        return vm.linear(c, 1.0 if x0 is None else x0)
    if family == "power":
        return vm.power(c, alpha, 1.0 if x0 is None else x0, variant)
    if family == "logistic":
        return vm.logistic(c, 0.5 if x0 is None else x0)
    return vm.symlogistic(c, 0.0 if x0 is None else x0)


@cli.command("motion1d")
@click.argument("action", type=click.Choice(["density", "support", "moment", "sample"]))
@click.option("--family", type=click.Choice(["constant", "linear", "power", "logistic", "symlogistic"]),
              required=True)
@click.option("--alpha", type=float, default=0.5, show_default=True, help="Exponent of the power family.")
@click.option("--variant", type=click.Choice(["reflect", "absorb"]), default=None,
              help="Behaviour of the power family at zero.")
@click.option("--x0", type=float, default=None, help="Starting point (family default if omitted).")
@telegraph_options
@click.option("--grid", type=click.IntRange(min=1), default=101, show_default=True)
@click.option("--a", type=float, default=1.0, show_default=True, help="Moment order (logistic).")
@click.option("--N", "N", type=click.IntRange(0, 30), default=30, show_default=True,
              help="Series truncation (logistic).")
@click.option("--hydro", is_flag=True, help="Hydrodynamic-limit moment instead.")
@click.option("--replicas", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=None, help="Required for 'sample'.")
@output_options
@click.pass_context
def motion1d(ctx, action, family, alpha, variant, x0, lam, c, t, grid, a, N, hydro, replicas,
             seed, fmt, out):
    """Space-varying speed: density table, support, logistic moments or samples."""
    model = _model(family, c, x0, alpha, variant)
    if action == "density":
        lo, hi = vm.support(model, t)
        x = np.linspace(lo, hi, grid + 2)[1:-1]
        emit(ctx, ["x", "f"], zip(x, vm.density_x(model, lam, x, t)),
             {"atom_mass": 0.5 * math.exp(-lam * t)})
    elif action == "support":
        lo, hi = vm.support(model, t)
        m = 0.5 * math.exp(-lam * t)
        emit(ctx, ["endpoint", "location", "atom_mass"], [("lower", lo, m), ("upper", hi, m)],
             {"t_star": model.t_star})
    elif action == "moment":
        if family != "logistic":
            raise DomainError("moment series are available for the logistic family only")
        if hydro:
            r = vm.logistic_moment_hydro(a, model.x0, t, N)
        else:
            r = vm.logistic_moment(a, tg.TelegraphParams(lam, c), model.x0, t, N)
        emit(ctx, ["value", "last_term", "terms", "warning"],
             [(r.value, r.last_term, r.terms, bool(r.warning))], {"note": r.note})
    else:
        if seed is None:
            raise click.UsageError("'sample' needs an explicit --seed")
        x = vm.sample_x(model, lam, t, replicas, _rng("motion1d", seed))
        emit(ctx, ["X"], ([v] for v in x))


# ---------------------------------------------------------------------------
# planar
# ---------------------------------------------------------------------------

@cli.command("planar")
@click.argument("action", type=click.Choice(["sample", "density", "boundary", "support"]))
@telegraph_options
@click.option("--p", type=click.FloatRange(0, 1), default=0.5, show_default=True,
              help="Probability of the d0<->d1, d2<->d3 turns.")
@click.option("--family", type=click.Choice(["constant", "symlogistic"]), default="constant",
              show_default=True)
@click.option("--grid", type=click.IntRange(min=2), default=51, show_default=True)
@click.option("--replicas", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=None, help="Required for 'sample'.")
@output_options
@click.pass_context
def planar(ctx, action, lam, c, t, p, family, grid, replicas, seed, fmt, out):
    """Orthogonal planar motion: samples, density grid, side laws, support."""
    P = pl.PlanarParams(lam, c, p)
    model = vm.constant(c) if family == "constant" else vm.symlogistic(c)
    ct = c * t
    if action == "sample":
        if seed is None:
            raise click.UsageError("'sample' needs an explicit --seed")
        S = pl.sample_endpoints(P, t, replicas, _rng("planar", seed), track=False)
        xy = np.column_stack([model.Winv(S.uv[:, 0]), model.Winv(S.uv[:, 1])])
        emit(ctx, ["x", "y", "boundary"], ((x, y, int(b)) for (x, y), b in zip(xy, S.on_boundary)))
    elif action == "density":
        u = np.linspace(-ct, ct, grid + 2)[1:-1]
        U, V = np.meshgrid(u, u, indexing="ij")
        inside = (np.abs(U + V) < ct) & (np.abs(U - V) < ct)
        x, y = model.Winv(U[inside]), model.Winv(V[inside])
        f = pl.wrapped_density_xy(model, P, x, y, t)
        emit(ctx, ["x", "y", "f"], zip(x, y, f),
             {"boundary_probability": pl.boundary_probability(P, t)})
    elif action == "boundary":
        u = np.linspace(0, ct, grid + 2)[1:-1]
        x = model.Winv(u)
        q = pl.side_density_q(P, u, t)
        h = pl.wrapped_boundary_abscissa(model, P, x, t)
        H = pl.side_density_H(P, 2 * u - ct, t)
        emit(ctx, ["u", "q", "eta", "H", "x", "h"], zip(u, q, 2 * u - ct, H, x, h),
             {"side_probability": pl.side_probability(P, t),
              "corner_mass": pl.corner_mass(P, t),
              "boundary_probability": pl.boundary_probability(P, t)})
    else:
        s = np.linspace(0, 1, grid)
        rows = []
        for side in pl.support_boundary(model, t):
            rows.extend((side.name, si, x, y) for si, (x, y) in zip(s, side(s)))
        emit(ctx, ["side", "s", "x", "y"], rows)


# ---------------------------------------------------------------------------
# dirdep
# ---------------------------------------------------------------------------

@cli.command("dirdep")
@click.argument("action", type=click.Choice(["sample", "mean", "condmean", "collapse"]))
@click.option("--x0", type=float, default=0.5, show_default=True)
@telegraph_options
@click.option("--n", type=click.IntRange(min=0), default=4, show_default=True,
              help="Highest switch count for 'condmean'.")
@click.option("--band", type=float, default=0.01, show_default=True)
@click.option("--replicas", type=int, default=10000, show_default=True)
@click.option("--seed", type=int, default=None, help="Required for 'sample' and 'collapse'.")
@output_options
@click.pass_context
def dirdep(ctx, action, x0, lam, c, t, n, band, replicas, seed, fmt, out):
    """Direction-dependent speed on (0, 1)."""
    P = dd.DirDepParams(lam, c, x0)
    if action in ("sample", "collapse") and seed is None:
        raise click.UsageError(f"'{action}' needs an explicit --seed")
    if action == "sample":
        x = dd.sample_endpoints(P, t, replicas, _rng("dirdep", seed))
        emit(ctx, ["X"], ([v] for v in x))
    elif action == "mean":
        emit(ctx, ["t", "mean"], [(t, dd.uncond_mean(P, t))])
    elif action == "condmean":
        rows = [(k, dd.cond_mean(P, dd.D0, k, t), dd.cond_mean(P, dd.D1, k, t)) for k in range(n + 1)]
        emit(ctx, ["n", "mean_d0", "mean_d1"], rows)
    else:
        r = dd.collapse_experiment(c, t, replicas, band, x0, seed)
        emit(ctx, ["frac_near_0", "frac_near_1"], [r.as_tuple()], {"lambda_used": r.lam})


# ---------------------------------------------------------------------------
# timevar
# ---------------------------------------------------------------------------

def _profile(sigma, table):
    if sigma == "const":
        return tv.constant()
    if sigma == "linear":
        return tv.linear()
    if table is None:
        raise click.UsageError("--sigma table needs --table PATH with (t, sigma) rows")
    with open(table, encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    # an optional header row is recognised by a non-numeric first field
    if lines:
        try:
            float(lines[0].split(",")[0])
        except ValueError:
            lines = lines[1:]
    try:
        data = np.loadtxt(lines, delimiter=",", ndmin=2)
    except ValueError as e:
        raise click.UsageError(f"cannot read --table {table}: {e}")
    if data.shape[0] < 2 or data.shape[1] < 2:
        raise click.UsageError("--table needs at least two (t, sigma) rows")
    return tv.tabulated(data[:, 0], data[:, 1])


@cli.command("timevar")
@click.argument("action", type=click.Choice(["sample", "cov", "limit"]))
@click.option("--sigma", type=click.Choice(["const", "linear", "table"]), default="const",
              show_default=True)
@click.option("--table", type=click.Path(exists=True, dir_okay=False), default=None,
              help="CSV of (t, sigma) knots for --sigma table.")
@telegraph_options
@click.option("--s", type=float, default=None, help="First time of the covariance (default t).")
@click.option("--replicas", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=None, help="Required for 'sample'.")
@output_options
@click.pass_context
def timevar(ctx, action, sigma, table, lam, c, t, s, replicas, seed, fmt, out):
    """Time-dependent speed c sigma(t)."""
    profile = _profile(sigma, table)
    P = tg.TelegraphParams(lam, c)
    s = t if s is None else s
    if action == "sample":
        if seed is None:
            raise click.UsageError("'sample' needs an explicit --seed")
        x = tv.sample_endpoints(profile, P, t, replicas, _rng("timevar", seed))
        emit(ctx, ["X"], ([v] for v in x))
    elif action == "cov":
        emit(ctx, ["s", "t", "covariance", "limit"],
             [(s, t, tv.covariance(profile, P, s, t), tv.limit_covariance(profile, s, t))])
    else:
        emit(ctx, ["s", "t", "limit_covariance"], [(s, t, tv.limit_covariance(profile, s, t))])


# ---------------------------------------------------------------------------
# geo2d
# ---------------------------------------------------------------------------

@cli.command("geo2d")
@click.argument("action", type=click.Choice(["sample", "density", "limit", "params"]))
@telegraph_options
@click.option("--p", type=click.FloatRange(0, 1), default=0.5, show_default=True)
@click.option("--x0", type=float, default=1.0, show_default=True)
@click.option("--y0", type=float, default=1.0, show_default=True)
@click.option("--grid", type=click.IntRange(min=2), default=41, show_default=True)
@click.option("--replicas", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=None, help="Required for 'sample'.")
@output_options
@click.pass_context
def geo2d(ctx, action, lam, c, t, p, x0, y0, grid, replicas, seed, fmt, out):
    """Bivariate geometric telegraph process."""
    if action == "params":
        emit(ctx, ["mu", "kappa", "sigma_sq", "eta_sq", "rho"], [g2.param_map(p)])
        return
    G = g2.Geo2dParams(lam, c, p, x0, y0)
    if action == "sample":
        if seed is None:
            raise click.UsageError("'sample' needs an explicit --seed")
        xy = g2.sample_endpoints(G, t, replicas, _rng("geo2d", seed))
        emit(ctx, ["x", "y"], xy)
        return
    ct = c * t
    u = np.linspace(-ct, ct, grid + 2)[1:-1]
    U, V = np.meshgrid(u, u, indexing="ij")
    inside = (np.abs(U + V) < ct) & (np.abs(U - V) < ct)
    x, y = x0 * np.exp(U[inside]), y0 * np.exp(V[inside])
    if action == "density":
        f = g2.joint_density(G, x, y, t)
        emit(ctx, ["x", "y", "f"], zip(x, y, f),
             {"boundary_probability": g2.boundary_probability(G, t)})
    else:
        emit(ctx, ["x", "y", "f"], zip(x, y, g2.limit_density(p, x0, y0, x, y, t)))


# ---------------------------------------------------------------------------
# euler and accept
# ---------------------------------------------------------------------------

@cli.command("euler")
@click.option("--n", type=click.IntRange(0, 64), required=True)
@click.option("--a", type=float, required=True)
@click.option("--theta", type=float, required=True)
@click.option("--x", "xs", type=float, multiple=True, help="Evaluate at these points too.")
@output_options
@click.pass_context
def euler(ctx, n, a, theta, xs, fmt, out):
    """Coefficients of the generalized Euler polynomial (power m, coefficient)."""
    poly = eg.euler_poly(n, a, theta)
    extra = {"coefficients": list(poly.coeffs)}
    if xs:
        extra["values"] = [[x, eg.euler_value(n, a, theta, x)] for x in xs]
    emit(ctx, ["power", "coefficient"], enumerate(poly.coeffs), extra)


@cli.command("accept")
@click.option("--suite", "suite_name", type=click.Choice(list(st.SUITES)), default="primary",
              show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--n", type=click.IntRange(min=2), default=100_000, show_default=True,
              help="Replicas per check.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def accept(ctx, suite_name, seed, n, out):
    """Run a check suite and print its reports as JSON; exit 1 if any fails."""
    reports = st.run_suite(suite_name, seed, n)
    body = {"meta": _meta(ctx), "reports": [r.to_dict() for r in reports]}
    write_text(to_json(body) + "\n", out)
    if any(r.verdict != "pass" for r in reports):
        ctx.exit(EXIT_CHECK_FAILED)


def main(argv=None):
    """Console entry point; returns the exit code."""
    try:
        cli.main(args=argv, prog_name="fvmotion", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.UsageError as e:
        e.show()
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_USAGE
    except (DomainError, SpecialFunctionError, QuadratureError) as e:
        click.echo(f"Error: {e}", err=True)
        return EXIT_DOMAIN
    return 0


if __name__ == "__main__":
    sys.exit(main())
