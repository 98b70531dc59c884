import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import linalg

from hfmdot import radial, spectrum, units
from hfmdot.spectrum import SolverSettings, SpectrumTable
from hfmdot.units import DotConfig

FAST = SolverSettings(K_max=4, N_max=10)


@given(st.integers(0, 4), st.integers(-6, 6), st.floats(0.5, 20), st.floats(0, 20))
def test_fock_darwin_limits(n, m, hw0, hwl):
    e = spectrum.fock_darwin(n, m, hw0, hwl)
    assert e > 0
    assert spectrum.fock_darwin(n, m, hw0, 0.0) == hw0 * (2 * n + abs(m) + 1)
    big = 1e6 * hw0
    assert spectrum.fock_darwin(n, m, hw0, big) == pytest.approx(spectrum.landau_level(n, m, big), rel=1e-5)


def crossing_ratio(s1, s2):
    """omega_L/omega0 at which two Fock-Darwin levels cross, or None."""
    a = (2 * s1[0] + abs(s1[1]) + 1) - (2 * s2[0] + abs(s2[1]) + 1)
    b = s1[1] - s2[1]
    if a == 0 or b == 0 or np.sign(a) != np.sign(b) or abs(b) <= abs(a):
        return None
    return math.sqrt(a * a / (b * b - a * a))


def test_crossings_match_closed_form():
    hw0 = 5.0
    mat = units.GAAS
    b_of = lambda t: t * hw0 * mat.m_eff_ratio / units.BOHR_MAGNETON_MEV_PER_T  # noqa: E731
    b_max = b_of(1.0)
    states = [(n, m) for n in range(2) for m in range(-3, 4)]
    expected = 0
    for i, s1 in enumerate(states):
        for s2 in states[i + 1:]:
            t = crossing_ratio(s1, s2)
            if t is None:
                continue
            fr = units.frequencies(hw0, b_of(t))
            e1 = spectrum.fock_darwin(*s1, fr.omega0, fr.omega_L)
            e2 = spectrum.fock_darwin(*s2, fr.omega0, fr.omega_L)
            assert e1 == pytest.approx(e2, rel=1e-12)
            expected += t < 1.0
    # offset the grid so no sample lands exactly on a crossing
    table = spectrum.field_sweep(DotConfig(hw0), np.linspace(1e-4, b_max, 997), "cm", n_max=1, m_max=3)
    assert spectrum.count_level_crossings(table) == expected
    assert expected > 0


def test_noninteracting_reduction_all_states():
    dot = DotConfig(5.0, 1.2, 0.0, 1.0)
    for sector, L in (("symmetric", 0), ("mixed", 0), ("antisymmetric", 1)):
        st_ = SolverSettings(K_max=6, N_max=6, L=L, sector=sector)
        e, _, ham, cond = spectrum.solve_levels(dot, st_)
        np.testing.assert_allclose(e, np.sort(ham.diagonal_energies), atol=1e-10)
        assert cond == pytest.approx(1.0)


def test_first_order_perturbation():
    hw = 5.0
    beta = 0.01 * hw
    st_ = SolverSettings(K_max=0, N_max=20)
    coupling = st_.coupling()
    e, _, _, _ = spectrum.solve_levels(DotConfig(hw, 0.0, beta, 1.0), st_, coupling, n_levels=1)
    w00 = coupling.A[0, 0] * radial.log_radial_element_analytic(0, 0, 0) + coupling.B[0, 0]
    shift = e[0] - 2 * hw
    assert shift == pytest.approx(beta * w00, rel=1e-2)


def test_variational_monotonicity_in_radial_basis():
    dot = DotConfig(5.0, 0.0, 15.0, 1.0)
    coupling = SolverSettings(K_max=4).coupling()
    es = [spectrum.solve_levels(dot, SolverSettings(K_max=4, N_max=n), coupling, 1)[0][0] for n in (2, 4, 8, 16, 32)]
    assert all(b <= a + 1e-12 for a, b in zip(es, es[1:]))


def test_ground_state_result():
    res = spectrum.ground_state(DotConfig(5.0, 0.5), FAST)
    assert res.norm == pytest.approx(1.0, abs=1e-12)
    assert list(res.trace) == [0, 2, 4]
    assert res.trace[4] == pytest.approx(res.energy, abs=1e-12)
    assert res.trace[2] == res.trace[0]  # no symmetric K=2, L=0 states
    assert len(res.coefficients) == len(res.states)
    k = int(np.argmax(np.abs(res.coefficients)))
    assert res.coefficients[k] > 0


def test_lowdin_matches_generalized_eigh():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(6, 6))
    H = A + A.T
    B = rng.normal(size=(6, 6))
    S = B @ B.T + 6 * np.eye(6)
    e, c, cond = spectrum.lowdin_solve(H, S)
    np.testing.assert_allclose(e, linalg.eigh(H, S, eigvals_only=True), rtol=1e-12)
    np.testing.assert_allclose(c.T @ S @ c, np.eye(6), atol=1e-12)
    assert cond > 1


def test_lowdin_prunes_null_directions():
    v = np.array([1.0, 1.0, 0.0]) / math.sqrt(2)
    S = np.eye(3) - np.outer(v, v) + 1e-14 * np.outer(v, v)
    e, c, _ = spectrum.lowdin_solve(np.diag([1.0, 2.0, 3.0]), S)
    assert len(e) == 2
    with pytest.raises(spectrum.IllConditionedOverlap):
        spectrum.lowdin_solve(np.eye(2), np.zeros((2, 2)))


def test_solver_settings_validation():
    for bad in (dict(K_max=-1), dict(N_max=-2), dict(sector="x"), dict(prefactor="y")):
        with pytest.raises(ValueError):
            SolverSettings(**bad)
    with pytest.raises(ValueError):
        spectrum.solve_levels(DotConfig(), SolverSettings(K_max=0, N_max=2, L=1))


def test_alternate_prefactor_scales_diagonal():
    dot = DotConfig(5.0, 0.0, 0.0)
    e_o, _, _, _ = spectrum.solve_levels(dot, SolverSettings(K_max=2, N_max=3), n_levels=3)
    e_p, _, _, _ = spectrum.solve_levels(dot, SolverSettings(K_max=2, N_max=3, prefactor="paper"), n_levels=3)
    np.testing.assert_allclose(e_p, e_o * math.sqrt(2 / 3), rtol=1e-14)


def test_table_round_trip(tmp_path):
    table = spectrum.field_sweep(DotConfig(), [0.0, 0.5, 1.0], "interacting", FAST, n_levels=3)
    path = tmp_path / "t.csv"
    text = table.to_csv(path, header_lines=["manifest: x"])
    back = SpectrumTable.from_csv(path)
    assert back.rows == table.rows
    assert back.metadata == table.metadata
    assert back.columns == ["B_T", "level", "energy_meV"]
    assert text.splitlines()[0] == "# manifest: x"
    assert SpectrumTable.from_csv(text).rows == table.rows


def test_table_requires_provenance():
    t = SpectrumTable("B_T", (), rows=[(0.0, 1.0)], metadata={"kind": "x"})
    with pytest.raises(ValueError, match="provenance"):
        t.to_csv()
    meta = {k: 0 for k in spectrum.REQUIRED_METADATA}
    t = SpectrumTable("B_T", (), rows=[(0.0, float("nan"))], metadata=meta)
    with pytest.raises(ValueError, match="non-finite"):
        t.validate()


def test_sweep_validation():
    with pytest.raises(ValueError):
        spectrum.field_sweep(DotConfig(), [], "cm")
    with pytest.raises(ValueError):
        spectrum.field_sweep(DotConfig(), [-1.0], "cm")
    with pytest.raises(ValueError):
        spectrum.field_sweep(DotConfig(), [0.0], "other")


def test_relative_table_contents():
    table = spectrum.field_sweep(DotConfig(5.0), [0.0], "relative-noninteracting", SolverSettings(K_max=2, N_max=1))
    assert table.column("energy_meV").tolist() == [10.0, 20.0, 20.0, 30.0]


@settings(max_examples=5, deadline=None)
@given(st.lists(st.floats(0, 5), min_size=1, max_size=4))
def test_interacting_sweep_thread_invariant(bs):
    dot = DotConfig()
    one = spectrum.field_sweep(dot, bs, "interacting", FAST, threads=1, n_levels=2)
    many = spectrum.field_sweep(dot, bs, "interacting", FAST, threads=3, n_levels=2)
    assert one.rows == many.rows


def test_code_version_format():
    v = spectrum.code_version()
    assert v.startswith("0.1.0+") and len(v.split("+")[1]) == 12
