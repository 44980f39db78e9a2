"""Command-line front end: ``deformqm <command> [options]``.

Every command writes CSV or JSON to ``--output``; without it output goes to
``$DEFORMQM_OUTPUT_DIR/<command>.<format>`` when that variable is set, and to
stdout otherwise. Exit status is 0 iff every executed check met its tolerance,
1 when a check failed, and 2 for invalid input or runtime errors.
"""

import argparse
from dataclasses import dataclass, field
import json
import os
from pathlib import Path
import sys
import warnings

import numpy as np

from . import box, eigenstates, fourier, io, matrix_pseudo, verify
from .metric import (
    UNIFORM_IN_U,
    DeformationContext,
    expectation,
    gaussian_packet,
    make_grid,
    pseudo_norm,
    uncertainty,
    wavefunction_from_csv,
)
from .operators import (
    DIRICHLET,
    Propagator,
    box_potential,
    hamiltonian,
    momentum_op,
    position_op,
)

OUTPUT_DIR_ENV = "DEFORMQM_OUTPUT_DIR"
JSON_DEFAULT = {"verify": "json", "matrix": "json"}
COMMANDS = ("verify", "spectrum", "overlap", "transform", "evolve", "sweep", "matrix")


class CommandError(Exception):
    """Invalid configuration or a module error, reported with exit status 2."""


@dataclass
class RunConfig:
    command: str
    tau: float = 0.5
    hbar: float = 1.0
    mass: float = 1.0
    a: float = 1.0
    n_nodes: int = 512
    n_max: int = 3
    xi_range: float | None = None
    t_list: tuple = (0.0, 1.0)
    format: str = "csv"
    output: str | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise CommandError(f"unknown command {self.command!r}")
        if self.format not in ("csv", "json"):
            raise CommandError(f"format must be csv or json, got {self.format!r}")
        if self.command != "sweep" and not 0.0 < self.tau < 1.0:
            raise CommandError(f"tau must be in (0, 1), got {self.tau}")
        if self.hbar <= 0 or self.mass <= 0:
            raise CommandError("hbar and mass must be positive")
        if self.n_nodes < 8 or self.n_max < 1:
            raise CommandError("n-nodes must be >= 8 and n-max >= 1")
        if self.xi_range is not None and self.xi_range <= 0:
            raise CommandError("xi-range must be positive")

    def context(self):
        return DeformationContext(self.tau, self.hbar, self.mass)

    def output_path(self):
        if self.output:
            return Path(self.output)
        env = os.environ.get(OUTPUT_DIR_ENV)
        if env:
            return Path(env) / f"{self.command}.{self.format}"
        return None


def _floats(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser():
    p = argparse.ArgumentParser(prog="deformqm", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tau", type=float, default=0.5, help="deformation parameter in (0, 1)")
    common.add_argument("--hbar", type=float, default=1.0)
    common.add_argument("--mass", type=float, default=1.0)
    common.add_argument("--format", choices=("csv", "json"),
                        help="output format (default: json for verify and matrix, else csv)")
    common.add_argument("--output", "-o", help="output file (default: stdout or $%s)" % OUTPUT_DIR_ENV)

    s = sub.add_parser("verify", parents=[common], help="run the numerical self-check suite")
    s.add_argument("--n-nodes", type=int, default=512)
    s.add_argument("--oracle-nodes", type=int, default=2000)
    s.add_argument("--states", type=int, default=10, help="random states for the GUP check")
    s.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("spectrum", parents=[common], help="box energies in x and y")
    s.add_argument("--a", type=float, default=1.0)
    s.add_argument("--n-max", type=int, default=3)
    s.add_argument("--oracle-nodes", type=int, default=0,
                   help="also run the direct-y grid oracle with this many nodes (>= 200)")
    s.add_argument("--allow-outside", action="store_true", help="permit tau*a > 1 (warns)")

    s = sub.add_parser("overlap", parents=[common], help="eigenfunction overlaps vs the printed sinc")
    s.add_argument("--deltas", type=_floats,
                   help="comma-separated xi differences in units of tau*hbar*sqrt3")
    s.add_argument("--delta-max", type=float, default=10.0)
    s.add_argument("--steps", type=int, default=201)

    s = sub.add_parser("transform", parents=[common], help="deformed Fourier transform of a packet")
    s.add_argument("--n-nodes", type=int, default=512)
    s.add_argument("--input", help="wavefunction CSV (x,u,w,re,im); default is a Gaussian in u")
    s.add_argument("--width", type=float, default=0.06, help="packet width, fraction of the u span")
    s.add_argument("--kick", type=float, default=0.0, help="packet momentum in units of hbar/width")
    s.add_argument("--xi-range", type=float, help="half-range of xi (default: adaptive)")

    s = sub.add_parser("evolve", parents=[common], help="time evolution of a packet")
    s.add_argument("--n-nodes", type=int, default=512)
    s.add_argument("--input", help="wavefunction CSV (x,u,w,re,im); default is a Gaussian in u")
    s.add_argument("--t-list", type=_floats, default=(0.0, 0.5, 1.0, 2.0))
    s.add_argument("--width", type=float, default=0.05)
    s.add_argument("--kick", type=float, default=1.0)
    s.add_argument("--depth", type=float, default=0.0, help="square-well depth outside --half-width")
    s.add_argument("--half-width", type=float, default=0.5, help="well half-width in units of 1/tau")

    s = sub.add_parser("sweep", parents=[common], help="energy contraction ratio over tau")
    s.add_argument("--tau-min", type=float, default=0.005)
    s.add_argument("--tau-max", type=float, default=0.5)
    s.add_argument("--steps", type=int, default=100)
    s.add_argument("--a", type=float, default=2.0)

    s = sub.add_parser("matrix", parents=[common], help="metric for a finite pseudo-Hermitian matrix")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--hamiltonian", help="JSON matrix, row-major; entries are numbers or [re, im]")
    g.add_argument("--input", help="file holding the JSON matrix")
    s.add_argument("--t-max", type=float, default=10.0)
    s.add_argument("--seed", type=int, default=0)
    return p


def config_from_args(args):
    known = {"tau", "hbar", "mass", "a", "n_nodes", "n_max", "xi_range", "t_list",
             "format", "output", "command"}
    ns = vars(args)
    kwargs = {k: v for k, v in ns.items() if k in known and v is not None}
    extra = {k: v for k, v in ns.items() if k not in known}
    if kwargs.get("format") is None:
        kwargs["format"] = JSON_DEFAULT.get(ns["command"], "csv")
    return RunConfig(extra=extra, **kwargs)


def _emit(cfg, csv_header, csv_rows, json_obj, stream):
    if cfg.format == "csv":
        io.write_csv(stream, csv_header, csv_rows)
    else:
        io.dump_json(json_obj, stream)


def _table_json(header, rows):
    return [dict(zip(header, r)) for r in rows]


def run_verify(cfg, stream):
    x = cfg.extra
    results = verify.run_checks(cfg.tau, cfg.n_nodes, cfg.hbar, cfg.mass,
                                oracle_nodes=x.get("oracle_nodes", 2000),
                                n_states=x.get("states", 10), seed=x.get("seed", 0))
    rep = verify.report(results)
    rep["config"] = {"tau": cfg.tau, "n_nodes": cfg.n_nodes, "hbar": cfg.hbar, "mass": cfg.mass}
    header = ("check_name", "residual", "tolerance", "pass")
    rows = [(r.check_name, r.residual, r.tolerance, r.passed) for r in results]
    _emit(cfg, header, rows, rep, stream)
    for r in results:
        if not r.passed:
            print(f"deformqm verify: FAILED {r.check_name}: residual {r.residual:.3e} "
                  f">= tolerance {r.tolerance:.1e}", file=sys.stderr)
    return 0 if rep["pass"] else 1


def run_spectrum(cfg, stream):
    x = cfg.extra
    spec = box.BoxSpec(cfg.context(), cfg.a, cfg.n_max, x.get("allow_outside", False))
    table = box.x_spectrum(spec) + box.y_spectrum_closed_form(spec)
    if x.get("oracle_nodes"):
        table = table + box.y_spectrum_oracle(spec, n_nodes=x["oracle_nodes"])
    if cfg.format == "csv":
        table.to_csv(stream)
    else:
        io.dump_json({"tau": cfg.tau, "a": cfg.a,
                      "contraction_ratio": box.contraction_ratio(spec.context, spec.a,
                                                                 spec.allow_outside),
                      "rows": table.to_records()}, stream)
    return 0


def run_overlap(cfg, stream):
    ctx = cfg.context()
    unit = ctx.tau * ctx.hbar * box.SQRT3
    x = cfg.extra
    if x.get("deltas"):
        mult = np.asarray(x["deltas"])
    else:
        mult = np.linspace(-x["delta_max"], x["delta_max"], x["steps"])
    header = ("delta", "oracle_re", "oracle_im", "closed_re", "closed_im", "paper", "abs_diff")
    rows = []
    for d, re, im, paper, diff in eigenstates.overlap_report(ctx, mult * unit):
        c = eigenstates.overlap_closed_form(ctx, 0.0, d)
        rows.append((d, re, im, c.real, c.imag, paper, diff))
    _emit(cfg, header, rows, {"tau": cfg.tau, "label": eigenstates.PAPER_STATED,
                              "rows": _table_json(header, rows)}, stream)
    return 0


def _initial_state(cfg, grid):
    x = cfg.extra
    if x.get("input"):
        with open(x["input"], newline="") as fh:
            phi = wavefunction_from_csv(fh, cfg.context())
        return phi.normalized()
    lo, hi = grid.u_bounds
    width = x["width"] * (hi - lo)
    return gaussian_packet(grid, 0.5 * (lo + hi), width, x["kick"] / width)


def _grid_for(cfg):
    return make_grid(cfg.context(), cfg.n_nodes, UNIFORM_IN_U)


def run_transform(cfg, stream):
    grid = _grid_for(cfg)
    psi = _initial_state(cfg, grid)
    grid = psi.grid
    xi = None
    if cfg.xi_range is not None:
        xi = fourier.default_xi_nodes(grid, cfg.xi_range)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", fourier.TruncationWarning)
        psi_t = fourier.forward_ft(psi, xi)
        pars = fourier.parseval_defect(psi, psi_t.xi_nodes)
        rt = fourier.round_trip_error(psi, psi_t.xi_nodes)
    for w in caught:
        print(f"deformqm transform: warning: {w.message}", file=sys.stderr)
    header = ("xi", "re", "im")
    rows = list(zip(psi_t.xi_nodes, psi_t.samples.real, psi_t.samples.imag))
    _emit(cfg, header, rows, {"tau": cfg.tau, "parseval_defect": pars, "round_trip_error": rt,
                              "tail_fraction": fourier.tail_fraction(psi_t),
                              "xi": psi_t.xi_nodes, "re": psi_t.samples.real,
                              "im": psi_t.samples.imag}, stream)
    return 0 if (pars < 1e-6 and rt < 1e-6) else 1


def run_evolve(cfg, stream):
    grid = _grid_for(cfg)
    phi0 = _initial_state(cfg, grid)
    grid = phi0.grid
    x = cfg.extra
    ctx = grid.context
    pot = None
    if x["depth"]:
        pot = box_potential(x["depth"], x["half_width"] * ctx.ell_max)
    prop = Propagator(hamiltonian(grid, pot, boundary=DIRICHLET))
    X = position_op(grid)
    P = momentum_op(grid, boundary=DIRICHLET)
    header = ("t", "norm", "mean_x", "mean_p", "dx", "dp")
    rows = []
    for t in cfg.t_list:
        phi = prop.evolve(phi0, t)
        rows.append((t, pseudo_norm(phi), expectation(X, phi).real, expectation(P, phi).real,
                     uncertainty(X, phi), uncertainty(P, phi)))
    drift = max(abs(r[1] - 1.0) for r in rows)
    _emit(cfg, header, rows, {"tau": cfg.tau, "method": prop.method, "norm_drift": drift,
                              "rows": _table_json(header, rows)}, stream)
    return 0 if drift < 1e-10 else 1


def run_sweep(cfg, stream):
    x = cfg.extra
    lo, hi, steps, a = x["tau_min"], x["tau_max"], x["steps"], cfg.a
    if not 0 < lo <= hi < 1 or steps < 1:
        raise CommandError("sweep needs 0 < tau-min <= tau-max < 1 and steps >= 1")
    header = ("tau", "tau_a", "ratio", "E1_y")
    rows = []
    for tau in np.linspace(lo, hi, steps):
        ctx = DeformationContext(float(tau), cfg.hbar, cfg.mass)
        spec = box.BoxSpec(ctx, a, 1)
        e1 = box.y_spectrum_closed_form(spec).energies()[0]
        rows.append((float(tau), float(tau) * a, box.contraction_ratio(ctx, a), e1))
    _emit(cfg, header, rows, {"a": a, "rows": _table_json(header, rows)}, stream)
    return 0


def run_matrix(cfg, stream):
    x = cfg.extra
    if x.get("input"):
        with open(x["input"]) as fh:
            data = json.load(fh)
    elif x.get("hamiltonian"):
        data = json.loads(x["hamiltonian"])
    else:
        data = [[2.0, 1.0], [0.0, 0.0]]
    H = matrix_pseudo.parse_matrix(data)
    S = matrix_pseudo.solve_metric(H)
    rng = np.random.default_rng(x.get("seed", 0))
    psi = rng.normal(size=H.dim) + 1j * rng.normal(size=H.dim)
    phi = rng.normal(size=H.dim) + 1j * rng.normal(size=H.dim)
    times = np.linspace(0.0, x.get("t_max", 10.0), 101)
    cons = matrix_pseudo.pseudo_expectation_conservation(H, S, psi, phi, times, cfg.hbar)
    residual = matrix_pseudo.similarity_residual(S, H)
    vals = H.eigenvalues()
    out = {
        "hamiltonian": H.entries,
        "spectrum": sorted(vals.real.tolist()),
        "metric": S.entries.real if np.all(S.entries.imag == 0) else S.entries,
        "metric_eigenvalues": S.eigenvalues(),
        "similarity_residual": residual,
        "hermiticity_defect": S.hermiticity_defect(),
        "conservation_drift": cons.max_drift,
        "pass": bool(residual < 1e-12 and cons.passed),
    }
    if H.dim == 2 and H.entries[1, 0] == 0 and H.entries[0, 0] != H.entries[0, 1]:
        al, be, ga = (H.entries[0, 0].real, H.entries[0, 1].real, H.entries[1, 1].real)
        out["printed_metric_residual"] = matrix_pseudo.similarity_residual(
            matrix_pseudo.paper_printed_metric(al, be, ga), H)
    header = ("quantity", "value")
    rows = [("similarity_residual", residual), ("conservation_drift", cons.max_drift)]
    rows += [(f"eigenvalue_{i}", v) for i, v in enumerate(out["spectrum"])]
    rows += [(f"metric_{i}{j}", float(S.entries[i, j].real))
             for i in range(H.dim) for j in range(H.dim)]
    _emit(cfg, header, rows, out, stream)
    return 0 if out["pass"] else 1


RUNNERS = {"verify": run_verify, "spectrum": run_spectrum, "overlap": run_overlap,
           "transform": run_transform, "evolve": run_evolve, "sweep": run_sweep,
           "matrix": run_matrix}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except CommandError as exc:
        parser.error(str(exc))
    path = cfg.output_path()
    try:
        if path is None:
            return RUNNERS[cfg.command](cfg, sys.stdout)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            return RUNNERS[cfg.command](cfg, fh)
    except OSError as exc:
        where = exc.filename or path
        print(f"deformqm {cfg.command}: error: {exc.strerror or exc} ({where})", file=sys.stderr)
        return 2
    except (ValueError, CommandError, RuntimeError) as exc:
        print(f"deformqm {cfg.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
