import csv
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from hfmdot import hyperangular as ha
from hfmdot import potential
from hfmdot.hyperangular import Channel


def beta_log_moment(a: int, b: int) -> float:
    """Closed form of the integral of cos^(2a+1) sin^(2b+1) ln(cos) over [0, pi/2]."""
    return 0.25 * special.beta(a + 1, b + 1) * (special.digamma(a + 1) - special.digamma(a + b + 2))


def test_anchor_integral():
    val, err = potential.log_cos_moment(lambda x: np.ones_like(x))
    assert val == pytest.approx(-0.25, abs=1e-14)
    assert err < 1e-12


@given(st.integers(0, 8), st.integers(0, 8))
def test_polynomial_log_moments(a, b):
    val, _ = potential.log_cos_moment(lambda x: np.cos(x) ** (2 * a) * np.sin(x) ** (2 * b))
    assert val == pytest.approx(beta_log_moment(a, b), rel=1e-11, abs=1e-14)


def test_k0_constant():
    c = Channel(0, 0, 0, 0)
    assert potential.own_set_constant(c, c) == pytest.approx(-0.5, abs=1e-14)


def test_own_set_constant_from_polynomial_expansion():
    # K=2, l1=l2=0: Phi = N cos(2 alpha), cos(2a)^2 = (c^2 - s^2)^2 expanded in monomials
    c = Channel(2, 0, 0, 1)
    norm2 = 3 / (2 * math.pi**2)
    exact = beta_log_moment(2, 0) - 2 * beta_log_moment(1, 1) + beta_log_moment(0, 2)
    assert potential.own_set_constant(c, c) == pytest.approx((2 * math.pi) ** 2 * norm2 * exact, rel=1e-12)
    # and the K=0/K=2 cross term: N0 N2 (c^2 - s^2)
    c0 = Channel(0, 0, 0, 0)
    cross = math.sqrt(3) / (2 * math.pi**2) * (beta_log_moment(1, 0) - beta_log_moment(0, 1))
    assert potential.own_set_constant(c0, c) == pytest.approx((2 * math.pi) ** 2 * cross, rel=1e-12)


def test_constant_selection_rule():
    assert potential.own_set_constant(Channel(2, 1, -1, 0), Channel(2, 0, 0, 1)) == 0.0
    C = potential.c_constant_matrix(ha.enumerate_channels(6, 0))
    np.testing.assert_array_equal(C, C.T)


def test_pair_matrix_hermitian_and_own_set():
    chans = ha.enumerate_channels(4, 0)
    np.testing.assert_allclose(potential.pair_matrix(chans, (1, 2)), potential.c_constant_matrix(chans))
    for pair in ((2, 3), (1, 3)):
        P = potential.pair_matrix(chans, pair)
        np.testing.assert_allclose(P, P.conj().T, atol=1e-13)


def test_pair_angular_integral():
    c = Channel(0, 0, 0, 0)
    res = potential.pair_angular_integral(c, c, (2, 3))
    assert res.ln_coefficient == 1.0 and not res.suppressed
    assert res.constant == pytest.approx(-0.5, abs=1e-12)
    off = potential.pair_angular_integral(c, Channel(2, 0, 0, 1), (1, 2))
    assert off.ln_coefficient == 0.0
    blocked = potential.pair_angular_integral(c, Channel(1, 1, 0, 0))
    assert blocked.suppressed and blocked.constant == 0.0


@pytest.mark.parametrize("sector,L", [("symmetric", 0), ("antisymmetric", 0), ("antisymmetric", 1), ("symmetric", 2)])
def test_one_dimensional_sectors_have_equal_pairs(sector, L):
    cd = potential.assemble_coupling(6, L, sector)
    b12, b23, b13 = cd.pair_blocks
    np.testing.assert_allclose(b12, b23, atol=1e-12)
    np.testing.assert_allclose(b12, b13, atol=1e-12)
    np.testing.assert_allclose(cd.A, 3 * np.eye(cd.dim), atol=1e-12)
    np.testing.assert_allclose(cd.B, 3 * b12 + 3 * math.log(potential.SEPARATION_SCALE) * np.eye(cd.dim), atol=1e-12)


def test_mixed_row_pairs_differ():
    cd = potential.assemble_coupling(6, 0, "mixed")
    b12, b23, b13 = cd.pair_blocks
    np.testing.assert_allclose(b23, b13, atol=1e-12)
    assert np.abs(b12 - b23).max() == pytest.approx(15 / 32, abs=1e-10)
    np.testing.assert_allclose(cd.A, 3 * np.eye(cd.dim), atol=1e-12)


def test_symmetric_ground_entry():
    cd = potential.assemble_coupling(0, 0, "symmetric")
    assert cd.states == ((0, 0),)
    assert cd.B[0, 0] == pytest.approx(3 * (-0.5) + 3 * math.log(potential.SEPARATION_SCALE), abs=1e-12)


def test_coupling_matrix_shape():
    cd = potential.assemble_coupling(6, 0, "symmetric")
    assert cd.states == ((0, 0), (4, 0), (6, 0))
    np.testing.assert_array_equal(cd.state_K, [0, 4, 6])
    np.testing.assert_allclose(cd.B, cd.B.T, atol=1e-14)
    W = cd.W(2.0, beta=0.7, rho0=0.5)
    np.testing.assert_allclose(W, 0.7 * (cd.A * math.log(4.0) + cd.B))


def test_separation_scale_enters_as_shift():
    a = potential.assemble_coupling(4, 0, "symmetric")
    b = potential.assemble_coupling(4, 0, "symmetric", separation_scale=1.0)
    np.testing.assert_allclose(a.B - b.B, 3 * math.log(potential.SEPARATION_SCALE) * np.eye(a.dim), atol=1e-13)


def test_no_channels_error():
    with pytest.raises(ValueError):
        potential.assemble_coupling(0, 1, "symmetric")


def test_write_matrix_csv(tmp_path):
    cd = potential.assemble_coupling(4, 0, "symmetric")
    path = tmp_path / "B.csv"
    potential.write_matrix_csv(path, cd.B, cd.states)
    rows = list(csv.reader(path.read_text().splitlines()))
    assert rows[0][0] == "state" and rows[1][0] == "(0, 0)"
    assert float(rows[1][1]) == cd.B[0, 0]
