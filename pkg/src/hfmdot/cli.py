"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 solver error,
4 failed self-check invariant, 5 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import hyperangular as ha
from . import radial, spectrum
from .config import ConfigError, RunConfig, load_config, parse_range

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_INVARIANT = 4
EXIT_IO = 5


@dataclass
class RunManifest:
    subcommand: str
    config: dict
    outputs: list[str]
    code_version: str
    started_at: str = ""
    wall_clock_s: float = 0.0
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        return cls(**json.loads(text))


def manifest_path(out: Path) -> Path:
    return out.with_name(out.name + ".manifest.json")


class _Run:
    """Collects outputs of one subcommand and writes the manifest at the end."""

    def __init__(self, name: str, cfg: RunConfig):
        self.name = name
        self.cfg = cfg
        self.outputs: list[Path] = []
        self.t0 = time.perf_counter()
        self.started = datetime.now(timezone.utc).isoformat(timespec="seconds")

    def write(self, path: Path, text: str) -> None:
        path.write_text(text)
        self.outputs.append(path)

    def finish(self, out: Path | None, extra=None) -> None:
        if out is None:
            return
        m = RunManifest(
            self.name, self.cfg.to_dict(), [p.name for p in self.outputs], spectrum.code_version(),
            self.started, round(time.perf_counter() - self.t0, 3), extra or {},
        )
        manifest_path(out).write_text(m.to_json())


def _emit_table(run: _Run, table: spectrum.SpectrumTable, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(table.to_csv())
        return
    run.write(out, table.to_csv(header_lines=[f"manifest: {manifest_path(out).name}"]))


def cmd_cm_spectrum(cfg: RunConfig, out: Path | None) -> int:
    run = _Run("cm-spectrum", cfg)
    table = spectrum.field_sweep(cfg.dot(), cfg.b_values(), "cm", n_max=cfg.cm_n_max, m_max=cfg.cm_m_max)
    _emit_table(run, table, out)
    run.finish(out)
    return EXIT_OK


def cmd_rel_spectrum(cfg: RunConfig, out: Path | None) -> int:
    run = _Run("rel-spectrum", cfg)
    table = spectrum.field_sweep(cfg.dot(), cfg.b_values(), "relative-noninteracting", cfg.settings())
    _emit_table(run, table, out)
    run.finish(out)
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, out: Path | None, threads: int = 1) -> int:
    run = _Run("sweep", cfg)
    table = spectrum.field_sweep(cfg.dot(), cfg.b_values(), "interacting", cfg.settings(),
                                 threads=threads, n_levels=cfg.n_levels)
    _emit_table(run, table, out)
    run.finish(out, {"threads": threads})
    return EXIT_OK


def ground_state_payload(cfg: RunConfig, result: spectrum.GroundStateResult) -> dict:
    return {
        "energy_meV": result.energy,
        "beta_meV": result.beta,
        "rho0": cfg.rho0,
        "b_field_T": cfg.b_field_T,
        "trace_meV": {str(k): v for k, v in result.trace.items()},
        "coefficients": [[s.K, s.nu, s.N, float(np.real(c)), float(np.imag(c))]
                         for s, c in zip(result.states, result.coefficients)],
        "coefficient_norm": result.norm,
        "overlap_condition_number": result.condition_number,
        "config": cfg.to_dict(),
        "code_version": spectrum.code_version(),
    }


def cmd_ground_state(cfg: RunConfig, out: Path | None) -> int:
    run = _Run("ground-state", cfg)
    dot = cfg.dot()
    result = spectrum.ground_state(dot, cfg.settings())
    payload = ground_state_payload(cfg, result)
    trace = spectrum.SpectrumTable(
        "K_max", (), ("energy_meV",), [(float(k), v) for k, v in result.trace.items()],
        spectrum._metadata("ground-state-trace", dot, cfg.settings(), ()),
    )
    if out is None:
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return EXIT_OK
    trace_path = out.with_name(out.stem + "_trace.csv")
    payload["manifest"] = manifest_path(out).name
    payload["trace_csv"] = trace_path.name
    run.write(out, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    run.write(trace_path, trace.to_csv(header_lines=[f"manifest: {manifest_path(out).name}"]))
    run.finish(out)
    return EXIT_OK


# --- self-check ----------------------------------------------------------------


def selfcheck(grid: ha.AngularGrid | None = None, verbose: bool = True) -> list[tuple[str, bool, str]]:
    """Fast invariant suite; returns (name, passed, detail) per check."""
    grid = grid or ha.AngularGrid(32, 32)
    results = []

    def record(name, ok, detail):
        results.append((name, bool(ok), detail))
        if verbose:
            print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")

    chans = ha.enumerate_channels(4, 0) + ha.enumerate_channels(4, 1)
    err = float(np.abs(ha.gram_matrix(chans, grid) - np.eye(len(chans))).max())
    record("orthonormality", err < 1e-10, f"max |G - I| = {err:.2e} over {len(chans)} channels (K <= 4)")

    worst = 0.0
    for K in range(5):
        for L in (0, 1):
            if (K - L) % 2:
                continue
            M = ha.rr_matrix(K, L, 3, 1, grid)
            worst = max(worst, ha.unitarity_defect(M))
    record("rr-unitarity", worst < 1e-8, f"max |M^H M - I| = {worst:.2e} (K <= 4)")

    worst = 0.0
    for K in (0, 2):
        for N in range(4):
            for Np in range(N, 4):
                a = radial.log_radial_element_analytic(K, N, Np, 1.3, 0.8)
                q = radial.log_radial_element_quadrature(K, N, Np, 1.3, 0.8)
                worst = max(worst, abs(a - q))
    record("log-elements", worst < 1e-10, f"max |analytic - quadrature| = {worst:.2e}")

    from .units import DotConfig

    dot = DotConfig(5.0, 1.5, 0.0, 1.0)
    settings = spectrum.SolverSettings(K_max=4, N_max=4, n_alpha=grid.n_alpha, n_phi=grid.n_phi)
    try:
        energies, _, ham, _ = spectrum.solve_levels(dot, settings)
        expected = np.sort(ham.diagonal_energies)
        err = float(np.abs(energies - expected).max())
    except (ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        record("beta0-reduction", False, f"solver raised {exc}")
        return results
    record("beta0-reduction", err < 1e-8, f"max |E - E0| = {err:.2e}")
    return results


def cmd_selfcheck(n_alpha: int, n_phi: int) -> int:
    results = selfcheck(ha.AngularGrid(n_alpha, n_phi))
    failed = [name for name, ok, _ in results if not ok]
    if failed:
        print("selfcheck failed: " + ", ".join(failed))
        return EXIT_INVARIANT
    print("selfcheck passed")
    return EXIT_OK


# --- argument parsing -------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON configuration file")
    p.add_argument("--k-max", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument("--L", type=int, dest="L")
    p.add_argument("--beta-mev", type=float)
    p.add_argument("--rho0", type=float)
    p.add_argument("--b", help="field range START:STOP:STEPS in Tesla (or a single value)")
    p.add_argument("--prefactor", choices=sorted(radial.PREFACTORS))
    p.add_argument("--symmetry", choices=ha.SECTORS)
    p.add_argument("--out", type=Path, help="output path (default: stdout, no manifest)")
    p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hfmdot", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("cm-spectrum", "Fock-Darwin center-of-mass levels over a field range"),
        ("rel-spectrum", "noninteracting relative-motion levels over a field range"),
        ("ground-state", "interacting ground state with K-convergence trace"),
        ("sweep", "interacting levels over a field range"),
    ):
        p = sub.add_parser(name, help=help_)
        _add_common(p)
        if name == "cm-spectrum":
            p.add_argument("--m-max", type=int)
    p = sub.add_parser("selfcheck", help="run the fast invariant suite")
    p.add_argument("--n-alpha", type=int, default=32)
    p.add_argument("--n-phi", type=int, default=32)
    return parser


def _resolve(args) -> RunConfig:
    overrides = {
        "k_max": args.k_max,
        "n_max": args.n_max,
        "L": args.L,
        "beta_meV": args.beta_mev,
        "rho0": args.rho0,
        "prefactor": args.prefactor,
        "symmetry": args.symmetry,
    }
    if args.command == "cm-spectrum":
        overrides["cm_n_max"] = overrides.pop("n_max")
        overrides["cm_m_max"] = args.m_max
    if args.b is not None:
        rng = parse_range(args.b)
        overrides["b_range"] = rng
        if args.command == "ground-state":
            overrides["b_field_T"] = rng[0]
    return load_config(args.config, overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "selfcheck":
        return cmd_selfcheck(args.n_alpha, args.n_phi)
    try:
        cfg = _resolve(args)
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        if args.command == "ground-state" and (cfg.k_max - cfg.L) % 2:
            raise ConfigError(f"ground-state needs k_max of the same parity as L, got k_max={cfg.k_max}, L={cfg.L}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "cm-spectrum":
            return cmd_cm_spectrum(cfg, args.out)
        if args.command == "rel-spectrum":
            return cmd_rel_spectrum(cfg, args.out)
        if args.command == "ground-state":
            return cmd_ground_state(cfg, args.out)
        return cmd_sweep(cfg, args.out, args.threads)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, RuntimeError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
