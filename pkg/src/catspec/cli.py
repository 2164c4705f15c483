"""Command line entry point: ``python -m catspec <subcommand> [--config PATH] [--out DIR]``."""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import adiabatic, field_meanfield as fmf, field_variational as fvar
from . import twomode_exact as tme, twomode_meanfield as tmf
from .config import ConfigError, RunConfig, load_config
from .core import CatSpecError, LambdaConvention, ModelParams, ParameterError
from .output import RunManifest, config_hash, fmt, write_csv, write_svg

SUBCOMMANDS = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "spectrum", "meanfield",
               "tf", "gaussian", "adiabatic", "varifield")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3


class SolverFailure(CatSpecError, RuntimeError):
    pass


def default_Lambda_grid() -> list[float]:
    """61 points on [0.5, 2] plus steps of 0.005 on [0.95, 1.05]."""
    pts = set(np.round(np.linspace(0.5, 2.0, 61), 12)) | set(np.round(np.arange(0.95, 1.05 + 1e-9, 0.005), 12))
    return sorted(float(x) for x in pts)


# ---------------------------------------------------------------------------
# no-RNG guard


_RNG_NAMES = ("default_rng", "seed", "random", "rand", "randn", "randint", "uniform", "normal",
              "choice", "shuffle", "permutation", "RandomState", "Generator")
_PY_RNG_NAMES = ("random", "seed", "uniform", "gauss", "randint", "choice", "shuffle", "sample")


def _forbidden(name):
    def f(*args, **kwargs):
        raise RuntimeError(f"random number generator used under --seed-free: {name}")
    return f


@contextlib.contextmanager
def seed_free():
    """Make every numpy and stdlib RNG entry point raise while active."""
    saved = []
    for mod, names, label in ((np.random, _RNG_NAMES, "numpy.random"), (random, _PY_RNG_NAMES, "random")):
        for name in names:
            if hasattr(mod, name):
                saved.append((mod, name, getattr(mod, name)))
                setattr(mod, name, _forbidden(f"{label}.{name}"))
    try:
        yield
    finally:
        for mod, name, obj in reversed(saved):
            setattr(mod, name, obj)


def _worker_init(no_rng: bool):
    if no_rng:
        seed_free().__enter__()


# ---------------------------------------------------------------------------
# helpers


def _two_mode_params(cfg: RunConfig, n: int) -> ModelParams:
    u0 = cfg.u0 if cfg.u0 is not None else 1.0 / n
    u1 = cfg.u1 if cfg.u1 is not None else cfg.u1_over_u0 * u0
    return ModelParams(n, u0, u1, 0.0, cfg.tilde_rescale)


def _lab_field_params(cfg: RunConfig) -> ModelParams:
    n = cfg.n_atoms or 1000
    if cfg.u0 is not None:
        u0 = cfg.u0
        u1 = cfg.u1 if cfg.u1 is not None else cfg.u1_over_u0 * u0
    else:
        x0_nm = cfg.x0_um * 1000.0
        u0 = 4.0 * math.pi * cfg.a_sc_nm / x0_nm
        u1 = 4.0 * math.pi * cfg.a_ab_nm / x0_nm
    return ModelParams(n, u0, u1, 0.0, cfg.tilde_rescale)


def _n_list(cfg: RunConfig, default):
    if cfg.n_list:
        return list(cfg.n_list)
    if cfg.n_atoms:
        return [cfg.n_atoms]
    return list(default)


def _grid(cfg: RunConfig) -> list[float]:
    return default_Lambda_grid() if cfg.Lambda_grid is None else list(cfg.Lambda_grid)


def _with_coupling(cfg: RunConfig, params: ModelParams, default_tilde: bool) -> ModelParams:
    if cfg.lam is not None:
        return params.with_lambda(cfg.lam)
    if cfg.Lambda is not None:
        return params.with_Lambda(cfg.Lambda, cfg.Lambda_convention, default_tilde)
    raise ConfigError("this subcommand needs 'lambda' or 'Lambda'")


class Run:
    def __init__(self, name: str, cfg: RunConfig, out: Path, executor):
        self.name, self.cfg, self.out, self.executor = name, cfg, out, executor
        flags = {"tilde_rescale": "module-default" if cfg.tilde_rescale is None else cfg.tilde_rescale,
                 "Lambda_convention": cfg.Lambda_convention,
                 "vari_coupling": "2lambda" if cfg.vari_coupling == 2.0 else "lambda"}
        self.manifest = RunManifest(name, config_hash(cfg.resolved()), flags)
        self.failures: list[str] = []

    def csv(self, filename, columns, rows, **extra):
        man = RunManifest(self.manifest.subcommand, self.manifest.config_hash,
                          dict(self.manifest.convention_flags, **extra), self.manifest.outputs)
        write_csv(self.out / filename, man, columns, rows)

    def svg(self, filename, series, title, xlabel, ylabel):
        write_svg(self.out / filename, series, title, xlabel, ylabel)
        self.manifest.outputs.append(filename)

    def note_rows(self, rows):
        for r in rows:
            if not r.valid:
                self.failures.append(f"Lambda={r.Lambda}: {r.error}")


def _sweep(run: Run, n: int):
    params = _two_mode_params(run.cfg, n)
    rows = tme.gap_ratio_sweep(params, _grid(run.cfg), run.executor)
    run.note_rows(rows)
    return params, rows


def _log10(x):
    return math.log10(x) if x > 0 and math.isfinite(x) else math.nan


def cmd_fig1(run: Run):
    n = run.cfg.n_atoms or 1000
    params, rows = _sweep(run, n)
    run.csv(f"fig1_N{n}.csv", ("Lambda", "E0"), [(r.Lambda, r.E0) for r in rows],
            n_atoms=n, u0=fmt(params.u0), u1=fmt(params.u1))
    run.svg(f"fig1_N{n}.svg", {f"N={n}": ([r.Lambda for r in rows], [r.E0 for r in rows])},
            "ground state energy", "Lambda", "E0")


def cmd_fig2(run: Run):
    series = {}
    for n in _n_list(run.cfg, (1000, 10000)):
        params, rows = _sweep(run, n)
        extra = dict(n_atoms=n, u0=fmt(params.u0), u1=fmt(params.u1))
        run.csv(f"fig2_N{n}.csv", tme.SWEEP_COLUMNS, [r.as_tuple() for r in rows], **extra)
        zoom = [r for r in rows if 0.9 <= r.Lambda <= 1.1]
        run.csv(f"fig2_zoom_N{n}.csv", tme.SWEEP_COLUMNS, [r.as_tuple() for r in zoom], **extra)
        series[f"N={n}"] = ([r.Lambda for r in rows], [_log10(r.ratio) for r in rows])
    run.svg("fig2.svg", series, "(E1-E0)/(E2-E1)", "Lambda", "log10 ratio")


def cmd_fig3(run: Run):
    for n in _n_list(run.cfg, (1000, 10000)):
        params, rows = _sweep(run, n)
        run.csv(f"fig3_N{n}.csv", ("Lambda", "gap01", "gap02", "gap03"),
                [(r.Lambda, r.gap01, r.gap02, r.gap03) for r in rows],
                n_atoms=n, u0=fmt(params.u0), u1=fmt(params.u1))
        xs = [r.Lambda for r in rows]
        run.svg(f"fig3_N{n}.svg", {"E1-E0": (xs, [r.gap01 for r in rows]),
                                    "E2-E0": (xs, [r.gap02 for r in rows]),
                                    "E3-E0": (xs, [r.gap03 for r in rows])},
                f"excitation energies, N={n}", "Lambda", "E_k - E0")


def cmd_fig4(run: Run):
    Ls = list(run.cfg.fig4_Lambdas)
    for n in _n_list(run.cfg, (1000, 10000)):
        params = _two_mode_params(run.cfg, n)
        cols, series = [], {}
        for L in Ls:
            p = params.with_Lambda(L, LambdaConvention.TWO_MODE, tme.TILDE_DEFAULT)
            cols.append(tme.ground_distribution(tme.diagonalize(tme.build_hamiltonian(p), 1)).probs)
        rows = [(m, *(c[m] for c in cols)) for m in range(n + 1)]
        run.csv(f"fig4_N{n}.csv", ("m", *(f"p_Lambda={fmt(L)}" for L in Ls)), rows,
                n_atoms=n, u0=fmt(params.u0), u1=fmt(params.u1))
        for L, c in zip(Ls, cols):
            series[f"Lambda={fmt(L)}"] = (list(range(n + 1)), list(c))
        run.svg(f"fig4_N{n}.svg", series, f"ground state number distribution, N={n}", "m", "p_m")


def _varifield_rows(run: Run):
    params = _lab_field_params(run.cfg)
    rows = fvar.spectrum_and_figures(params, _grid(run.cfg), run.cfg.vari_coupling, run.cfg.stride, run.executor)
    run.note_rows(rows)
    scale = fvar.Lambda_scale(params)
    extra = dict(n_atoms=params.n_atoms, u0=fmt(params.u0), u1=fmt(params.u1),
                 Lambda_axis="2 lambda / (N (U1-U0) int phi^4)", Lambda_field_per_unit=fmt(scale),
                 diagonal_convention="functional with U m^2 (constant offset from m(m-1))")
    return rows, extra


def cmd_fig5(run: Run):
    rows, extra = _varifield_rows(run)
    run.csv("fig5.csv", tme.SWEEP_COLUMNS, [r.as_tuple() for r in rows], **extra)
    run.svg("fig5.svg", {"field model": ([r.Lambda for r in rows], [_log10(r.ratio) for r in rows])},
            "(E1-E0)/(E2-E1), field model", "Lambda", "log10 ratio")


def cmd_fig6(run: Run):
    rows, extra = _varifield_rows(run)
    run.csv("fig6.csv", ("Lambda", "gap01", "gap02", "gap03"),
            [(r.Lambda, r.gap01, r.gap02, r.gap03) for r in rows], **extra)
    xs = [r.Lambda for r in rows]
    run.svg("fig6.svg", {"E1-E0": (xs, [r.gap01 for r in rows]), "E2-E0": (xs, [r.gap02 for r in rows]),
                         "E3-E0": (xs, [r.gap03 for r in rows])},
            "excitation energies, field model", "Lambda", "E_k - E0")


def cmd_spectrum(run: Run):
    cfg = run.cfg
    if cfg.n_atoms is None or cfg.u0 is None:
        raise ConfigError("spectrum needs n_atoms and u0")
    params = _with_coupling(cfg, _two_mode_params(cfg, cfg.n_atoms), tme.TILDE_DEFAULT)
    k = min(cfg.levels, params.n_atoms + 1)
    spec = tme.diagonalize(tme.build_hamiltonian(params), k, want_vectors=False)
    run.csv("spectrum.csv", ("k", "E", "parity"),
            [(i, float(e), int(spec.parities[i]) if spec.parities is not None else 0)
             for i, e in enumerate(spec.eigenvalues)],
            n_atoms=params.n_atoms, u0=fmt(params.u0), u1=fmt(params.u1), lam=fmt(params.lam))


def cmd_meanfield(run: Run):
    n = run.cfg.n_atoms or 1000
    params, rows = _sweep(run, n)
    out = []
    for r in rows:
        p = params.with_Lambda(r.Lambda, LambdaConvention.TWO_MODE, tmf.TILDE_DEFAULT)
        mf = tmf.meanfield_row(p) if p.lam > 0 else {"E_mf": math.nan, "eps": math.nan,
                                                      "E_plus": math.nan, "E_minus": math.nan}
        out.append((*r.as_tuple(), mf["E_mf"], mf["eps"], mf["E_plus"], mf["E_minus"]))
    run.csv(f"meanfield_N{n}.csv", (*tme.SWEEP_COLUMNS, "E_mf", "eps", "E_plus", "E_minus"), out,
            n_atoms=n, u0=fmt(params.u0), u1=fmt(params.u1))


def _field_grid(run: Run, params: ModelParams) -> list[float]:
    if run.cfg.Lambda_grid is not None:
        return list(run.cfg.Lambda_grid)
    L0 = fmf.tf_Lambda0(params)
    return [f * L0 for f in (0.25, 0.5, 0.75, 1.0, 1.25, 1.5)]


def _field_lam(params: ModelParams, Lambda: float) -> float:
    return params.with_Lambda(Lambda, LambdaConvention.FIELD, fmf.TILDE_DEFAULT).lam


def cmd_tf(run: Run):
    params = _lab_field_params(run.cfg)
    rows = []
    for i, L in enumerate(_field_grid(run, params)):
        lam = _field_lam(params, L)
        r = fmf.radial_grid(max(2.0 * fmf.tf_r0(params), 8.0), run.cfg.grid_points)
        for sol in fmf.solve_thomas_fermi(params, lam, r):
            rows.append((L, sol.branch, sol.mu, sol.energy, math.nan, math.nan, math.nan, math.nan))
            if sol.branch != "minus":
                with (run.out / f"tf_profile_{i}_{sol.branch}.csv").open("w") as fh:
                    fh.write(f"# Lambda: {fmt(L)}\n")
                    fmf.write_profile_csv(sol.profile, fh)
                run.manifest.outputs.append(f"tf_profile_{i}_{sol.branch}.csv")
    run.csv("tf_summary.csv", fmf.SUMMARY_COLUMNS, rows, Lambda_convention_used="field",
            Lambda0_tf=fmt(fmf.tf_Lambda0(params)))


def cmd_gaussian(run: Run):
    params = _lab_field_params(run.cfg)
    rows = []
    for L in _field_grid(run, params):
        lam = _field_lam(params, L)
        g = fmf.minimize_gaussian(params, lam, run.cfg.restarts)
        if not g.converged:
            run.failures.append(f"Lambda={L}: {g.message}")
        pairs = [("symmetric", g.pair)] if g.degenerate_partner is None else \
            [("plus", g.pair), ("minus", g.degenerate_partner)]
        for label, pr in pairs:
            rows.append((L, label, math.nan, g.energy, pr.amp_a, pr.width_a, pr.amp_b, pr.width_b))
    run.csv("gaussian_summary.csv", fmf.SUMMARY_COLUMNS, rows, Lambda_convention_used="field")


def cmd_adiabatic(run: Run):
    cfg = run.cfg
    n = cfg.n_atoms or 50
    u0 = cfg.u0 if cfg.u0 is not None else 0.02
    params = ModelParams(n, u0, cfg.u1 if cfg.u1 is not None else cfg.u1_over_u0 * u0, 0.0, cfg.tilde_rescale)
    ramp = adiabatic.RampSchedule(cfg.ramp_start, cfg.ramp_end, cfg.ramp_duration, cfg.ramp_shape)
    table = adiabatic.evolve(params, ramp, cfg.dt)
    run.csv("adiabatic.csv", adiabatic.TABLE_COLUMNS, list(table.rows()),
            n_atoms=n, u0=fmt(params.u0), u1=fmt(params.u1), ramp_shape=ramp.shape)
    run.svg("adiabatic.svg", {"fid0": (list(table.t), list(table.fid0)),
                              "fid01": (list(table.t), list(table.fid01))},
            "fidelity during the ramp", "t", "fidelity")


def cmd_varifield(run: Run):
    cfg = run.cfg
    params = _lab_field_params(cfg)
    L = cfg.Lambda if cfg.Lambda is not None else 0.8
    lam = cfg.lam if cfg.lam is not None else fvar.lambda_from_scaled(params, L)
    state = fvar.solve_orbitals(params, lam, cfg.vari_coupling, cfg.stride)
    if state.failed:
        run.failures.append(f"orbital solves failed at m={state.failed}")
    q = fvar.build_q_hamiltonian(state.widths, params, lam)
    spec = tme.diagonalize(q.matrix, min(cfg.levels, params.n_atoms + 1), want_vectors=False)
    extra = dict(n_atoms=params.n_atoms, lam=fmt(lam), q_asymmetry=fmt(q.asymmetry))
    run.csv("varifield_widths.csv", fvar.WIDTH_COLUMNS, list(enumerate(state.widths)), **extra)
    run.csv("varifield_spectrum.csv", ("k", "E"), list(enumerate(spec.eigenvalues)), **extra)


COMMANDS = {name: globals()[f"cmd_{name}"] for name in SUBCOMMANDS}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="catspec", description="Two-component condensate cat-state solvers.")
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    ap.add_argument("--config", default=None, help="key = value configuration file")
    ap.add_argument("--out", default=".", help="output directory")
    ap.add_argument("--threads", type=int, default=None, help="worker processes (env CATSPEC_THREADS)")
    ap.add_argument("--seed-free", action="store_true", help="fail if any random number generator is used")
    return ap


def _threads(arg) -> int:
    if arg is not None:
        return max(1, arg)
    env = os.environ.get("CATSPEC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"CATSPEC_THREADS must be an integer, got {env!r}") from None
    return 1


def _error(kind: str, exc: BaseException, out: Path | None) -> dict:
    rec = {"status": "error", "kind": kind, "type": type(exc).__name__, "message": str(exc)}
    print(json.dumps(rec), file=sys.stderr)
    if out is not None and out.is_dir():
        (out / "error.json").write_text(json.dumps(rec, indent=2) + "\n")
    return rec


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    try:
        cfg = load_config(args.config)
        threads = _threads(args.threads)
        out.mkdir(parents=True, exist_ok=True)
    except (ConfigError, ParameterError) as exc:
        _error("config", exc, None)
        return EXIT_CONFIG
    except OSError as exc:
        _error("config", exc, None)
        return EXIT_CONFIG
    guard = seed_free() if args.seed_free else contextlib.nullcontext()
    executor = None
    try:
        with guard:
            if threads > 1:
                executor = ProcessPoolExecutor(max_workers=threads, initializer=_worker_init,
                                               initargs=(args.seed_free,))
            run = Run(args.subcommand, cfg, out, executor)
            COMMANDS[args.subcommand](run)
    except (ConfigError, ParameterError) as exc:
        _error("config", exc, out)
        return EXIT_CONFIG
    except (CatSpecError, ArithmeticError, ValueError, RuntimeError) as exc:
        _error("solver", exc, out)
        return EXIT_SOLVER
    finally:
        if executor is not None:
            executor.shutdown()
    (out / "manifest.json").write_text(json.dumps(run.manifest.to_dict(), indent=2, sort_keys=True) + "\n")
    if run.failures:
        _error("solver", SolverFailure("; ".join(run.failures)), out)
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
