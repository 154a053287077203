"""Command-line front end.

Exit codes: 0 success (or an invariant finding), 2 a non-invariant finding,
1 a usage, configuration or numerical error.

Random streams: every command seeds its samplers from the config seed with
:func:`marginodds.samplers.stream_rng`, using the scheme name as the stream
name (``unconstrained``, ``constrained``, ``double``, ``dependent``).
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from . import io
from .config import ExperimentConfig
from .diagnostics import (
    CF_DIFF_DECISION,
    cf_grid_compare,
    concentration_study,
    kde,
    ks_two_sample,
    ks_weighted,
    prior_tau_variance,
    silverman_bandwidth,
    weighted_quantile,
)
from .errors import ConfigError, DegenerateWeightsWarning, MarginOddsError
from .model import as_contrast, assumption2c_check, margin_free, odds_ratio_2x2
from .samplers import (
    WeightedSample,
    posterior_constrained,
    posterior_dependent_example,
    posterior_double_constrained,
    posterior_unconstrained,
    stream_rng,
)
from .special import CFGrid, cf_dependent_example, cf_logpsi

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DIFFERENT = 2

QUANTILES = (0.025, 0.25, 0.5, 0.75, 0.975)


def _cf_pair(cfg: ExperimentConfig, j: int) -> tuple[CFGrid, CFGrid]:
    t = cfg.t_values()
    x, alpha = cfg.counts, cfg.build_alpha()
    if cfg.prior == "dependent":
        return (
            CFGrid(t, cf_dependent_example(t, alpha, x, "unconstrained"), "unconstrained"),
            CFGrid(t, cf_dependent_example(t, alpha, x, "constrained"), "constrained"),
        )
    c, p = cfg.build_contrast(), cfg.build_partition()
    return (
        CFGrid(t, cf_logpsi(t, alpha, x, c, p, "unconstrained", j), "unconstrained"),
        CFGrid(t, cf_logpsi(t, alpha, x, c, p, "constrained", j), "constrained"),
    )


def _require_or(cfg: ExperimentConfig, what: str) -> None:
    c = as_contrast(cfg.build_contrast())
    if not (cfg.is_2x2() and c.shape[1] == 1 and np.array_equal(c, odds_ratio_2x2())):
        raise ConfigError(f"{what} is only defined for the 2 x 2 odds ratio")


def draw_scheme(cfg: ExperimentConfig, scheme: str, prior: str | None = None) -> WeightedSample:
    """Posterior draws of every log psi column under ``scheme``."""
    prior = cfg.prior if prior is None else prior
    rng = stream_rng(cfg.seed, scheme)
    x, alpha, n = cfg.counts, cfg.build_alpha(), int(cfg.samples)
    c = cfg.build_contrast()
    if scheme == "double":
        _require_or(cfg, "the both-margins scheme")
        return posterior_double_constrained(alpha, x, n, rng)
    if prior == "dependent":
        _require_or(cfg, "the dependent prior")
        return posterior_dependent_example(alpha, x, n, rng, scheme)
    if scheme == "unconstrained":
        return posterior_unconstrained(alpha, x, c, n, rng)
    return posterior_constrained(alpha, x, cfg.build_partition(), c, n, rng)


def _expand_schemes(cfg: ExperimentConfig) -> list[tuple[str, str, str]]:
    """(label, scheme, prior) triples to report; 'dependent' means both schemes."""
    out = []
    for scheme in cfg.schemes:
        if scheme == "dependent":
            out += [(f"dependent-{s}", s, "dependent") for s in ("unconstrained", "constrained")]
        else:
            out.append((scheme, scheme, cfg.prior))
    return out


def cmd_invariance(cfg: ExperimentConfig) -> int:
    c = cfg.build_contrast()
    p = cfg.build_partition()
    x = cfg.counts
    n = int(x.sum())
    free = margin_free(c, p)
    d = as_contrast(c).shape[1]
    print(f"margin_free: {free}")
    cond = [assumption2c_check(c, p, j, n) for j in range(d)]
    for j, ok in enumerate(cond):
        print(f"column {j}: sample-size condition (n={n}) {'holds' if ok else 'fails'}")

    worst, worst_t, worst_j = 0.0, 0.0, 0
    for j in range(d if cfg.prior == "dirichlet" else 1):
        u, con = _cf_pair(cfg, j)
        diff, where = cf_grid_compare(u, con)
        print(f"column {j}: max |phi_u - phi_c| = {diff:.3e} at t = {where:g}")
        if diff > worst:
            worst, worst_t, worst_j = diff, where, j

    su = draw_scheme(cfg, "unconstrained")
    sc = draw_scheme(cfg, "constrained")
    ks = ks_two_sample(su.column(cfg.column).values, sc.column(cfg.column).values)
    print(
        f"KS (column {cfg.column}, N={cfg.samples}): D = {ks.statistic:.4g}, "
        f"threshold {ks.threshold:.4g}, significant at 0.01: {ks.significant_at_01}"
    )

    if worst > CF_DIFF_DECISION:
        print(f"verdict: non-invariant (column {worst_j}, argmax t = {worst_t:g})")
        return EXIT_DIFFERENT
    if not free and not all(cond):
        print(
            "note: some block sums are nonzero, but the sample-size condition fails, "
            "so a difference is not guaranteed for this n"
        )
    print("verdict: invariant")
    return EXIT_OK


def cmd_cf(cfg: ExperimentConfig) -> int:
    u, con = _cf_pair(cfg, cfg.column)
    path = io.write_cf_pair(Path(cfg.out) / "cf.csv", u, con)
    diff, where = cf_grid_compare(u, con)
    print(f"wrote {path}; max abs_diff {diff:.3e} at t = {where:g}")
    return EXIT_OK


def cmd_figure(cfg: ExperimentConfig) -> int:
    _require_or(cfg, "the figure")
    x, alpha = cfg.counts, cfg.build_alpha()
    rows = posterior_constrained(
        alpha, x, cfg.build_partition(), odds_ratio_2x2(), cfg.samples,
        stream_rng(cfg.seed, "constrained"),
    ).column(0)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DegenerateWeightsWarning)
        both = posterior_double_constrained(alpha, x, cfg.samples, stream_rng(cfg.seed, "double"))
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)

    lo = min(rows.values.min(), both.values.min())
    hi = max(rows.values.max(), both.values.max())
    curves = {}
    for name, s in (("row_fixed", rows), ("double_fixed", both)):
        h = silverman_bandwidth(s)
        grid = np.linspace(lo - 5 * h, hi + 5 * h, 1024)
        curves[name] = kde(s, grid=grid, bandwidth=h)
        io.write_density(Path(cfg.out) / f"figure_{name}.csv", curves[name])
    ks = ks_weighted(rows, both)
    report = {
        "ess_double_fixed": both.effective_sample_size,
        "samples": int(cfg.samples),
        "ks": ks,
        "integral_row_fixed": curves["row_fixed"].integral(),
        "integral_double_fixed": curves["double_fixed"].integral(),
        "mean_row_fixed": float(rows.mean()),
        "mean_double_fixed": float(both.mean()),
    }
    io.write_json(Path(cfg.out) / "figure_report.json", report)
    print(
        f"ESS {report['ess_double_fixed']:.0f} of {cfg.samples}; weighted KS D = "
        f"{ks.statistic:.4g} (significant at 0.01: {ks.significant_at_01})"
    )
    return EXIT_OK


def summarize(s: WeightedSample) -> dict:
    q = weighted_quantile(s.values, s.weights, QUANTILES)
    out = {"mean": float(s.mean()), "sd": float(np.sqrt(s.var()))}
    out.update({f"q{100 * a:g}": float(v) for a, v in zip(QUANTILES, q)})
    return out


def cmd_analyze(cfg: ExperimentConfig) -> int:
    c = as_contrast(cfg.build_contrast())
    header = ["scheme", "column", "mean", "sd"] + [f"q{100 * a:g}" for a in QUANTILES]
    rows = []
    for label, scheme, prior in _expand_schemes(cfg):
        s = draw_scheme(cfg, scheme, prior)
        ncols = 1 if s.values.ndim == 1 else s.values.shape[1]
        for j in range(ncols):
            summ = summarize(s.column(j))
            rows.append([label, j] + [summ[k] for k in header[2:]])
    io.write_csv(Path(cfg.out) / "analyze.csv", header, rows)
    print("  ".join(f"{h:>13}" for h in header))
    for row in rows:
        print("  ".join(f"{v:>13}" if isinstance(v, (str, int)) else f"{v:>13.5g}" for v in row))
    if cfg.prior == "dirichlet":
        for j in range(c.shape[1]):
            u, con = _cf_pair(cfg, j)
            diff, _ = cf_grid_compare(u, con)
            flag = "DIFFER" if diff > CF_DIFF_DECISION else "same"
            print(f"column {j}: unconstrained vs constrained posteriors {flag} (max CF diff {diff:.3e})")
    return EXIT_OK


def cmd_concentration(cfg: ExperimentConfig) -> int:
    scheme = cfg.schemes[0]
    if scheme not in ("unconstrained", "constrained"):
        raise ConfigError("concentration needs the unconstrained or constrained scheme")
    theta0 = np.full(cfg.r, 1.0 / cfg.r) if cfg.theta0 is None else np.asarray(cfg.theta0, float)
    p, c, alpha = cfg.build_partition(), cfg.build_contrast(), cfg.build_alpha()
    table = concentration_study(
        theta0, c, p, cfg.n_list, scheme, cfg.samples, stream_rng(cfg.seed, scheme),
        alpha=alpha, j=cfg.column,
    )
    path = io.write_concentration(Path(cfg.out) / f"concentration_{scheme}.csv", table)
    for n, v in table.rows():
        print(f"n = {n:>7d}  var(log psi) = {v:.6g}")
    if scheme == "constrained":
        floor, se = prior_tau_variance(alpha, c, p, cfg.samples, stream_rng(cfg.seed, "prior"), cfg.column)
        print(f"prior variance of the block part: {floor:.6g} (se {se:.2g})")
    print(f"wrote {path}")
    return EXIT_OK


COMMANDS = {
    "invariance": cmd_invariance,
    "cf": cmd_cf,
    "figure": cmd_figure,
    "analyze": cmd_analyze,
    "concentration": cmd_concentration,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


HELP = {
    "invariance": "decide whether fixing the margin changes the posterior",
    "cf": "write both posterior characteristic functions on a t grid",
    "figure": "density data for row-fixed vs both-margins-fixed posteriors",
    "analyze": "posterior summaries of log psi under each scheme",
    "concentration": "posterior variance of log psi as n grows",
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="marginodds",
        description="Posterior invariance of generalized odds ratios under margin constraints.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name, help=HELP[name])
        sp.add_argument("--config", required=True, type=Path, help="JSON experiment config")
        sp.add_argument("--seed", type=int, help="override the config seed (unsigned 64-bit)")
        sp.add_argument("--samples", type=int, help="posterior draws per scheme")
        sp.add_argument("--tmin", type=float)
        sp.add_argument("--tmax", type=float)
        sp.add_argument("--tpoints", type=int)
        sp.add_argument("--out", type=Path, help="output directory")
        sp.add_argument(
            "--scheme",
            choices=("unconstrained", "constrained", "double", "dependent"),
            help="restrict to one scheme; 'dependent' switches to the dependent prior",
        )
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config)
    d = cfg.to_dict()
    if args.seed is not None:
        d["seed"] = args.seed
    if args.samples is not None:
        d["samples"] = args.samples
    for key in ("tmin", "tmax", "tpoints"):
        if getattr(args, key) is not None:
            d["t_grid"][key] = getattr(args, key)
    if args.out is not None:
        d["out"] = str(args.out)
    if args.scheme == "dependent":
        d["prior"] = "dependent"
        d["schemes"] = ["unconstrained", "constrained"]
    elif args.scheme is not None:
        d["schemes"] = [args.scheme]
    return ExperimentConfig.from_dict(d)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](cfg)
    except (MarginOddsError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
