import math

import mpmath
import pytest

from bbpert import OracleConfig, OracleNotConverged, reference_eigenvalue, scaled_eigenvalue
from bbpert.oracle import (
    default_omega,
    direct_eigenvalue,
    ground_energy,
    hamiltonian_matrix,
    ladder_power_column,
    reference_result,
)
from bbpert.numkernel import working_precision


@pytest.fixture(scope="module")
def e_quartic():
    return reference_eigenvalue(2)


def test_ladder_columns_are_integers():
    # (a + a^dag)^2 |0) = (a^dag)^2|0) + |0)
    assert ladder_power_column(2, 0) == {2: 1, 0: 1}
    col = ladder_power_column(4, 2)
    assert all(isinstance(v, int) for v in col.values())


def test_x4_matrix_element():
    # <0|x^4|0> = 3 / (4 omega^2), in the even basis of frequency omega
    with working_precision(30):
        omega = mpmath.mpf(3)
        H = hamiltonian_matrix(2, 6, omega)
        kinetic = omega / 2
        assert mpmath.almosteq(H[0, 0] - kinetic, mpmath.mpf(3) / (4 * omega ** 2), 1e-28)


def test_harmonic_exact():
    assert reference_eigenvalue(1) == 1
    with working_precision(30):
        assert mpmath.almosteq(ground_energy(1, 8, 1), 1, 1e-25)


def test_quartic_reference(e_quartic):
    assert mpmath.nstr(e_quartic, 16) == "1.060362090484183"


def test_variational_monotonicity():
    with working_precision(30):
        omega = default_omega(3)
        energies = [ground_energy(3, n, omega) for n in (4, 8, 12, 20, 30, 45)]
        for a, b in zip(energies, energies[1:]):
            assert b <= a * (1 + mpmath.mpf(10) ** -25)
        assert energies[0] - energies[-1] > 1e-3


@pytest.mark.parametrize("scale", [0.5, 1.0, 2.0])
def test_basis_scale_invariance(e_quartic, scale):
    cfg = OracleConfig(basis_size=80, scale=scale)
    e = reference_eigenvalue(2, cfg)
    assert abs(e - e_quartic) < 1e-12 * e_quartic


def test_scaling_identity(e_quartic):
    assert scaled_eigenvalue(2, 1) == e_quartic
    with working_precision(30):
        assert mpmath.almosteq(scaled_eigenvalue(2, 8), 2 * e_quartic, 1e-25)
    direct = direct_eigenvalue(2, 2)
    assert abs(scaled_eigenvalue(2, 2) - direct) < 1e-10 * direct


def test_scaling_identity_sextic():
    direct = direct_eigenvalue(3, 5)
    assert abs(scaled_eigenvalue(3, 5) - direct) < 1e-10 * direct


def test_not_converged():
    cfg = OracleConfig(basis_size=4, convergence_window=2, max_basis_size=10, target_digits=14)
    with pytest.raises(OracleNotConverged):
        reference_eigenvalue(4, cfg)


def test_result_json():
    r = reference_result(3)
    d = r.to_json()
    assert d["K"] == 3 and d["converged"] is True
    assert d["eigenvalue"].startswith("1.144802453797")
    assert d["basis_size"] >= 40


def test_config_validation():
    with pytest.raises(ValueError):
        OracleConfig(basis_size=2)
    with pytest.raises(ValueError):
        scaled_eigenvalue(2, -1)
    assert math.isfinite(float(default_omega(4)))
