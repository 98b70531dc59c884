"""Truncated Rayleigh-Ritz problem, Fock-Darwin levels and field sweeps."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import linalg

from . import __version__
from . import hyperangular as ha
from . import potential, radial
from .units import DotConfig, Frequencies


def fock_darwin(n: int, m: int, hbar_omega0: float, hbar_omega_L: float) -> float:
    """Center-of-mass level hbar*omega_eff*(2n+|m|+1) - hbar*omega_L*m (meV)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return math.hypot(hbar_omega0, hbar_omega_L) * (2 * n + abs(m) + 1) - hbar_omega_L * m


def landau_level(n: int, m: int, hbar_omega_L: float) -> float:
    """Strong-field limit of :func:`fock_darwin` with omega0 -> 0."""
    return hbar_omega_L * (2 * n + abs(m) - m + 1)


@dataclass(frozen=True)
class BasisState:
    K: int
    nu: int
    N: int


@dataclass(frozen=True)
class Hamiltonian:
    H: np.ndarray  # meV
    S: np.ndarray
    states: tuple[BasisState, ...]
    diagonal_energies: np.ndarray  # noninteracting levels, meV


def assemble_hamiltonian(
    coupling: potential.CouplingDecomposition,
    N_max: int,
    freqs: Frequencies,
    beta: float,
    rho0: float = 1.0,
    prefactor_mode: str = "oracle",
) -> Hamiltonian:
    """H = diag(E0_KN) + beta * [A (x) <ln(rho/rho0)> + B (x) <u_KN|u_K'N'>].

    A and B come from :func:`potential.assemble_coupling`; the radial factors
    use the oscillator width alpha = omega_eff/omega0.
    """
    if N_max < 0:
        raise ValueError("N_max must be non-negative")
    width = freqs.width
    nr = N_max + 1
    states = tuple(BasisState(K, nu, N) for (K, nu) in coupling.states for N in range(nr))
    n_ang = coupling.dim
    Ks = coupling.state_K
    e0 = np.array([
        radial.noninteracting_energy(s.N, s.K, coupling.L, freqs.omega_eff, freqs.omega_L, prefactor_mode)
        for s in states
    ])
    log_blocks = {K: radial.log_matrix(K, N_max, width, rho0) for K in sorted(set(Ks.tolist()))}
    ovl_blocks = {}
    dtype = np.result_type(coupling.A, coupling.B, float)
    V = np.zeros((n_ang * nr, n_ang * nr), dtype=dtype)
    S = np.zeros((n_ang * nr, n_ang * nr))
    for i in range(n_ang):
        for j in range(n_ang):
            Ki, Kj = int(Ks[i]), int(Ks[j])
            key = (Ki, Kj)
            if key not in ovl_blocks:
                ovl_blocks[key] = radial.overlap_matrix(Ki, Kj, N_max)
            blk = coupling.B[i, j] * ovl_blocks[key]
            if Ki == Kj:
                blk = blk + coupling.A[i, j] * log_blocks[Ki]
                if i == j:
                    S[i * nr:(i + 1) * nr, j * nr:(j + 1) * nr] = ovl_blocks[key]
            V[i * nr:(i + 1) * nr, j * nr:(j + 1) * nr] = blk
    H = np.diag(e0).astype(dtype) + beta * V
    H = (H + H.conj().T) / 2
    if not np.all(np.isfinite(H)):
        raise FloatingPointError("non-finite Hamiltonian element")
    return Hamiltonian(H, S, states, e0)


class IllConditionedOverlap(RuntimeError):
    pass


def lowdin_solve(H: np.ndarray, S: np.ndarray, threshold: float = 1e-10):
    """Solve H c = E S c by canonical (Lowdin) orthogonalization.

    Overlap eigenvectors below ``threshold`` are pruned. Returns
    (energies, coefficients, condition number of S); columns of the
    coefficient matrix are S-orthonormal.
    """
    s_vals, s_vecs = linalg.eigh(S)
    if s_vals.max() <= threshold:
        raise IllConditionedOverlap("overlap matrix has no usable directions")
    keep = s_vals > threshold
    X = s_vecs[:, keep] / np.sqrt(s_vals[keep])
    Hp = X.conj().T @ H @ X
    Hp = (Hp + Hp.conj().T) / 2
    energies, vecs = linalg.eigh(Hp)
    cond = float(s_vals.max() / max(s_vals.min(), np.finfo(float).tiny))
    return energies, X @ vecs, cond


@dataclass(frozen=True)
class GroundStateResult:
    energy: float
    coefficients: np.ndarray
    states: tuple[BasisState, ...]
    trace: dict[int, float]
    condition_number: float
    beta: float

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.coefficients) ** 2))


@dataclass(frozen=True)
class SolverSettings:
    K_max: int = 6
    N_max: int = 20
    L: int = 0
    sector: str = "symmetric"
    prefactor: str = "oracle"
    n_alpha: int = 64
    n_phi: int = 64

    def __post_init__(self):
        if self.K_max < 0 or self.N_max < 0:
            raise ValueError("K_max and N_max must be non-negative")
        if self.sector not in ha.SECTORS:
            raise ValueError(f"sector must be one of {ha.SECTORS}")
        if self.prefactor not in radial.PREFACTORS:
            raise ValueError(f"prefactor must be one of {sorted(radial.PREFACTORS)}")

    @property
    def grid(self) -> ha.AngularGrid:
        return ha.AngularGrid(self.n_alpha, self.n_phi)

    def coupling(self) -> potential.CouplingDecomposition:
        return potential.assemble_coupling(self.K_max, self.L, self.sector, self.grid)


def _truncate(coupling: potential.CouplingDecomposition, K_max: int) -> potential.CouplingDecomposition:
    keep = [i for i, (K, _) in enumerate(coupling.states) if K <= K_max]
    ix = np.ix_(keep, keep)
    return potential.CouplingDecomposition(
        coupling.A[ix], coupling.B[ix], tuple(coupling.states[i] for i in keep),
        coupling.sector, coupling.L, tuple(b[ix] for b in coupling.pair_blocks),
    )


def solve_levels(config: DotConfig, settings: SolverSettings, coupling=None, n_levels: int | None = None):
    """All (or the lowest ``n_levels``) energies in meV plus the Hamiltonian."""
    coupling = coupling if coupling is not None else settings.coupling()
    if coupling.dim == 0:
        raise ValueError(f"sector {settings.sector!r} has no L={settings.L} states with K <= {settings.K_max}")
    ham = assemble_hamiltonian(coupling, settings.N_max, config.frequencies, config.beta_mev, config.rho0, settings.prefactor)
    energies, vecs, cond = lowdin_solve(ham.H, ham.S)
    if n_levels is not None:
        energies, vecs = energies[:n_levels], vecs[:, :n_levels]
    return energies, vecs, ham, cond


def ground_state(config: DotConfig, settings: SolverSettings, coupling=None) -> GroundStateResult:
    """Lowest level with the convergence trace over K_max' = K_min, K_min+2, ..., K_max."""
    coupling = coupling if coupling is not None else settings.coupling()
    trace = {}
    for Kt in range(settings.L % 2, settings.K_max + 1, 2):
        sub = _truncate(coupling, Kt)
        if sub.dim == 0:
            continue
        e, _, _, _ = solve_levels(config, settings, sub, n_levels=1)
        trace[Kt] = float(e[0])
    energies, vecs, ham, cond = solve_levels(config, settings, coupling, n_levels=1)
    coeffs = vecs[:, 0]
    coeffs = coeffs / np.linalg.norm(coeffs)
    k = int(np.argmax(np.abs(coeffs)))
    coeffs = coeffs * (abs(coeffs[k]) / coeffs[k])
    if np.allclose(coeffs.imag, 0.0):
        coeffs = coeffs.real
    return GroundStateResult(float(energies[0]), coeffs, ham.states, trace, cond, config.beta_mev)


# --- tables -------------------------------------------------------------------


def code_version() -> str:
    """Package version plus a short hash of the installed source files."""
    digest = hashlib.sha256()
    for path in sorted(Path(__file__).parent.glob("*.py")):
        digest.update(path.name.encode())
        digest.update(path.read_bytes())
    return f"{__version__}+{digest.hexdigest()[:12]}"


REQUIRED_METADATA = ("kind", "hbar_omega0_meV", "beta_meV", "rho0", "code_version")


@dataclass
class SpectrumTable:
    """Rows of (sweep value, integer labels..., float values...) with provenance metadata."""

    sweep_param: str
    labels: tuple[str, ...]
    values: tuple[str, ...] = ("energy_meV",)
    rows: list[tuple] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def validate(self) -> None:
        missing = [k for k in REQUIRED_METADATA if k not in self.metadata]
        if missing:
            raise ValueError(f"spectrum table lacks provenance metadata: {missing}")
        width = 1 + len(self.labels) + len(self.values)
        for row in self.rows:
            if len(row) != width:
                raise ValueError(f"row {row} does not match columns")
            if not all(math.isfinite(x) for x in row[1 + len(self.labels):]):
                raise ValueError(f"non-finite value in row {row}")

    @property
    def columns(self) -> list[str]:
        return [self.sweep_param, *self.labels, *self.values]

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])

    def to_csv(self, path=None, header_lines=()) -> str:
        self.validate()
        buf = io.StringIO()
        for line in header_lines:
            buf.write(f"# {line}\n")
        buf.write("# meta: " + json.dumps(self.metadata, sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        nl = len(self.labels)
        for r in self.rows:
            w.writerow([repr(float(r[0])), *(str(int(x)) for x in r[1:1 + nl]), *(repr(float(x)) for x in r[1 + nl:])])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source, n_labels: int | None = None) -> "SpectrumTable":
        """Parse a table from a path or from CSV text (anything containing a newline)."""
        if isinstance(source, str) and "\n" in source:
            text = source
        else:
            text = Path(source).read_text()
        meta = {}
        body = []
        for line in text.splitlines():
            if line.startswith("# meta: "):
                meta = json.loads(line[len("# meta: "):])
            elif not line.startswith("#") and line:
                body.append(line)
        reader = csv.reader(body)
        header = next(reader)
        if n_labels is None:
            n_labels = int(meta.get("n_labels", 0))
        labels = tuple(header[1:1 + n_labels])
        values = tuple(header[1 + n_labels:])
        rows = [
            (float(r[0]), *(int(x) for x in r[1:1 + n_labels]), *(float(x) for x in r[1 + n_labels:]))
            for r in reader
        ]
        return cls(header[0], labels, values, rows, meta)


def _metadata(kind: str, config: DotConfig, settings: SolverSettings | None, labels, extra=None) -> dict:
    meta = {
        "kind": kind,
        "hbar_omega0_meV": config.hbar_omega0,
        "beta_meV": config.beta_mev,
        "rho0": config.rho0,
        "m_eff_ratio": config.material.m_eff_ratio,
        "epsilon_r": config.material.epsilon_r,
        "code_version": code_version(),
        "n_labels": len(labels),
    }
    if settings is not None:
        meta.update(
            k_max=settings.K_max, n_max=settings.N_max, L=settings.L, sector=settings.sector,
            prefactor=settings.prefactor, n_alpha=settings.n_alpha, n_phi=settings.n_phi,
        )
    meta.update(extra or {})
    return meta


def _with_field(config: DotConfig, b: float) -> DotConfig:
    return DotConfig(config.hbar_omega0, b, config.beta, config.rho0, config.material)


def cm_table(config: DotConfig, b_values, n_max: int = 1, m_max: int = 5) -> SpectrumTable:
    labels = ("n", "m")
    table = SpectrumTable("B_T", labels, ("energy_meV", "landau_meV"),
                          metadata=_metadata("cm", config, None, labels, {"n_max": n_max, "m_max": m_max}))
    for b in b_values:
        fr = _with_field(config, b).frequencies
        for n in range(n_max + 1):
            for m in sorted(range(-m_max, m_max + 1), key=lambda m: (abs(m), -m)):
                table.rows.append((float(b), n, m, fock_darwin(n, m, fr.omega0, fr.omega_L), landau_level(n, m, fr.omega_L)))
    return table


def relative_noninteracting_table(config: DotConfig, settings: SolverSettings, b_values) -> SpectrumTable:
    labels = ("K", "L", "N")
    table = SpectrumTable("B_T", labels, metadata=_metadata("relative-noninteracting", config, settings, labels))
    for b in b_values:
        fr = _with_field(config, b).frequencies
        for K in range(abs(settings.L), settings.K_max + 1, 2):
            for N in range(settings.N_max + 1):
                e = radial.noninteracting_energy(N, K, settings.L, fr.omega_eff, fr.omega_L, settings.prefactor)
                table.rows.append((float(b), K, settings.L, N, e))
    return table


def interacting_table(config: DotConfig, settings: SolverSettings, b_values, n_levels: int = 5, threads: int = 1) -> SpectrumTable:
    labels = ("level",)
    table = SpectrumTable("B_T", labels, metadata=_metadata("interacting", config, settings, labels, {"n_levels": n_levels}))
    coupling = settings.coupling()

    def solve(b):
        e, _, _, _ = solve_levels(_with_field(config, b), settings, coupling, n_levels)
        return e

    b_values = [float(b) for b in b_values]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(solve, b_values))
    for b, energies in zip(b_values, results):
        table.rows.extend((b, i, float(e)) for i, e in enumerate(energies))
    return table


SWEEP_KINDS = ("cm", "relative-noninteracting", "interacting")


def field_sweep(config: DotConfig, b_values, what: str = "interacting", settings: SolverSettings | None = None,
                threads: int = 1, n_levels: int = 5, n_max: int = 1, m_max: int = 5) -> SpectrumTable:
    b_values = list(b_values)
    if not b_values:
        raise ValueError("field sweep needs at least one field value")
    if any(b < 0 for b in b_values):
        raise ValueError("field values must be non-negative")
    settings = settings or SolverSettings()
    if what == "cm":
        return cm_table(config, b_values, n_max, m_max)
    if what == "relative-noninteracting":
        return relative_noninteracting_table(config, settings, b_values)
    if what == "interacting":
        return interacting_table(config, settings, b_values, n_levels, threads)
    raise ValueError(f"unknown sweep kind {what!r}; expected one of {SWEEP_KINDS}")


def count_level_crossings(table: SpectrumTable, value: str = "energy_meV") -> int:
    """Number of sign changes of pairwise level differences between successive sweep points."""
    sweep = sorted(set(table.column(table.sweep_param)))
    by_point = {}
    nl = len(table.labels)
    vi = table.columns.index(value)
    for r in table.rows:
        by_point.setdefault(r[0], {})[tuple(r[1:1 + nl])] = r[vi]
    keys = sorted(by_point[sweep[0]])
    count = 0
    for a_i in range(len(keys)):
        for b_i in range(a_i + 1, len(keys)):
            a, b = keys[a_i], keys[b_i]
            prev = None
            for x in sweep:
                d = by_point[x][a] - by_point[x][b]
                s = 0 if abs(d) < 1e-12 else (1 if d > 0 else -1)
                if s == 0:
                    continue
                if prev is not None and s != prev:
                    count += 1
                prev = s
    return count
