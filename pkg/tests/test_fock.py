import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from catcoh.errors import DomainError, TruncationWarning
from catcoh.fock import (
    CatSpec,
    DensityMatrix,
    FockKet,
    Parity,
    SqueezeSpec,
    annihilation,
    basis_ket,
    cat_density,
    cat_ket,
    coherent_ket,
    db_to_squeezing,
    fock_density,
    ket_to_density,
    mean_photon_number,
    photon_subtract,
    rotate,
    squeezed_vacuum_ket,
    tail_mass,
)
from catcoh.measures import fidelity_to_cat

alphas = st.floats(min_value=0.05, max_value=1.8)
parities = st.sampled_from(["even", "odd"])


def assert_density_invariants(rho: DensityMatrix):
    m = rho.elements
    assert np.max(np.abs(m - m.conj().T)) <= 1e-12
    assert abs(np.trace(m).real - 1) <= 1e-10
    assert np.linalg.eigvalsh(m).min() >= -1e-10


# --- types ---------------------------------------------------------------

def test_ket_rejects_small_dim_and_bad_norm():
    with pytest.raises(DomainError):
        FockKet(np.array([1.0]))
    with pytest.raises(DomainError):
        FockKet(np.array([1.0, 1.0]))
    with pytest.raises(DomainError):
        FockKet(np.array([np.nan, 1.0]))


def test_density_rejects_invalid():
    with pytest.raises(DomainError):
        DensityMatrix(np.array([[0.5, 0.1], [0.2, 0.5]]))
    with pytest.raises(DomainError):
        DensityMatrix(np.diag([0.7, 0.2]))
    with pytest.raises(DomainError):
        DensityMatrix(np.diag([1.2, -0.2]))


def test_density_is_immutable():
    rho = fock_density(0, 4)
    with pytest.raises(ValueError):
        rho.elements[0, 0] = 0.5


def test_parity_enum():
    assert Parity("odd").flipped is Parity.EVEN
    assert Parity.EVEN.sign == 1 and Parity.ODD.sign == -1


# --- coherent ------------------------------------------------------------

def test_coherent_vacuum():
    k = coherent_ket(0.0, 12)
    assert k.amps[0] == 1 and np.all(k.amps[1:] == 0)


def test_coherent_mean_photon_number():
    k = coherent_ket(1.06, 12)
    assert mean_photon_number(k) == pytest.approx(1.06 ** 2, abs=1e-4)


def test_coherent_tail_against_poisson():
    k = coherent_ket(1.06, 12)
    oracle_tail = 1.0 - oracles.poisson(1.06, 12).sum()
    assert k.tail < 1e-6
    assert k.tail == pytest.approx(oracle_tail, rel=1e-6, abs=1e-15)


@given(st.floats(min_value=0.0, max_value=1.0))
def test_coherent_populations_are_poisson(alpha):
    k = coherent_ket(alpha, 16)
    pois = oracles.poisson(alpha, 16)
    assert k.tail < 1e-6
    np.testing.assert_allclose(k.populations, pois / pois.sum(), atol=1e-10)


def test_coherent_rejects():
    with pytest.raises(DomainError):
        coherent_ket(1.0, 1)
    with pytest.raises(DomainError):
        coherent_ket(float("inf"), 8)


# --- cats ----------------------------------------------------------------

def test_even_cat_at_zero_is_vacuum():
    k = cat_ket(CatSpec(0.0, Parity.EVEN, 12))
    assert k.amps[0] == 1


def test_odd_cat_at_zero_rejected():
    with pytest.raises(DomainError):
        CatSpec(0.0, Parity.ODD, 12)
    with pytest.raises(DomainError):
        CatSpec(-1.0, Parity.EVEN, 12)


def test_small_odd_cat_is_single_photon():
    k = cat_ket(CatSpec(0.01, Parity.ODD, 12))
    assert abs(k.amps[1]) ** 2 > 0.9999


def test_odd_cat_populations():
    p = cat_ket(CatSpec(1.06, Parity.ODD, 12)).populations
    assert p[1] == pytest.approx(0.8168, abs=1e-3)
    assert p[3] == pytest.approx(0.1719, abs=1e-3)
    assert p[5] == pytest.approx(0.0109, abs=1e-3)


@given(alphas, parities)
def test_cat_amplitudes_match_factorial_series(alpha, parity):
    k = cat_ket(CatSpec(alpha, parity, 12))
    np.testing.assert_allclose(k.amps.real, oracles.cat_amplitudes(alpha, parity, 12), atol=1e-12)
    assert np.all(k.amps.imag == 0)


@given(alphas, parities)
def test_cat_parity_purity(alpha, parity):
    k = cat_ket(CatSpec(alpha, parity, 12))
    wrong = 0 if parity == "odd" else 1
    assert np.all(k.amps[wrong::2] == 0)
    assert abs(np.linalg.norm(k.amps) - 1) <= 1e-12


def test_cat_density_element():
    rho = cat_density(1.06, "odd", 12)
    assert rho.elements[1, 3].real == pytest.approx(0.9038 * 0.4146, abs=1e-3)
    assert rho.purity() == pytest.approx(1.0, abs=1e-10)
    assert_density_invariants(rho)


@pytest.mark.parametrize("alpha,parity,d", [(1.3, "odd", 11), (2.5, "odd", 12), (1.06, "odd", 12), (2.0, "even", 16)])
def test_cat_tail_against_series(alpha, parity, d):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        k = cat_ket(CatSpec(alpha, parity, d))
    assert k.tail == pytest.approx(oracles.cat_tail_series(alpha, parity, d), rel=1e-9)


def test_tail_thresholds():
    assert tail_mass(basis_ket(0, 8), 5) == 0
    assert tail_mass(cat_ket(CatSpec(1.3, Parity.ODD, 11)), 10) < 1e-3
    with pytest.warns(TruncationWarning, match="tail mass exceeds 1e-3"):
        k = cat_ket(CatSpec(2.5, Parity.ODD, 12))
    assert tail_mass(k, 11) > 1e-3


def test_tail_mass_within_representation():
    k = cat_ket(CatSpec(1.06, Parity.ODD, 12))
    expected = k.tail + (1 - k.tail) * k.populations[6:].sum()
    assert tail_mass(k, 5) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(DomainError):
        tail_mass(k, 12)


def test_ket_to_density_hermitian():
    rng = np.random.default_rng(3)
    v = rng.normal(size=9) + 1j * rng.normal(size=9)
    rho = ket_to_density(FockKet(v / np.linalg.norm(v)))
    assert np.max(np.abs(rho.elements - rho.elements.conj().T)) < 1e-15
    assert rho.purity() == pytest.approx(1.0, abs=1e-10)


# --- squeezing -----------------------------------------------------------

def test_db_conversion():
    r = db_to_squeezing(-3.0)
    assert r == pytest.approx(0.34539, abs=1e-5)
    assert math.exp(-2 * r) == pytest.approx(10 ** (-0.3), rel=1e-12)
    assert SqueezeSpec(r).variance_ratio == pytest.approx(10 ** (-0.3))


def test_squeezed_vacuum():
    assert squeezed_vacuum_ket(SqueezeSpec(0.0)).amps[0] == 1
    k = squeezed_vacuum_ket(SqueezeSpec(0.34539, 12))
    assert k.populations[0] == pytest.approx(1 / math.cosh(0.34539), abs=1e-4)
    assert np.all(k.amps[1::2] == 0)
    assert k.tail < 1e-6


def test_squeezed_amplitudes_closed_form():
    r = 0.5
    k = squeezed_vacuum_ket(SqueezeSpec(r, 30))
    t = math.tanh(r)
    c = [(-t) ** m * math.sqrt(math.factorial(2 * m)) / (2 ** m * math.factorial(m)) / math.sqrt(math.cosh(r))
         for m in range(15)]
    np.testing.assert_allclose(k.amps[::2].real, np.array(c) / np.linalg.norm(c), atol=1e-12)


def test_squeezed_x_variance():
    r = 0.34539
    k = squeezed_vacuum_ket(SqueezeSpec(r, 40))
    a = annihilation(40)
    x = (a + a.T) / math.sqrt(2)
    var = float(np.real(k.amps.conj() @ x @ x @ k.amps))
    assert var == pytest.approx(0.5 * math.exp(-2 * r), rel=1e-9)


def test_squeezed_rejects_negative():
    with pytest.raises(DomainError):
        SqueezeSpec(-0.1)


# --- subtraction / rotation ----------------------------------------------

def test_subtract_ladder():
    out = photon_subtract(fock_density(1, 6))
    assert out.elements[0, 0] == pytest.approx(1.0)


def test_subtract_vacuum_errors():
    with pytest.raises(DomainError, match="zero subtraction probability"):
        photon_subtract(fock_density(0, 6))


def test_subtract_flips_parity_and_keeps_dim():
    sq = ket_to_density(squeezed_vacuum_ket(SqueezeSpec(0.5, 12)))
    out = photon_subtract(sq)
    assert out.dim == 12
    assert np.all(np.abs(out.elements[::2, :]) < 1e-15)
    assert np.all(out.elements[-1, :] == 0)
    assert_density_invariants(out)
    back = photon_subtract(photon_subtract(sq))
    assert np.all(np.abs(back.elements[1::2, :]) < 1e-15)


def test_subtracted_squeezed_vacuum_is_cat_like():
    # Squeezing along x gives a cat along p; the fit uses real alpha after a pi/2 turn.
    sq = ket_to_density(squeezed_vacuum_ket(SqueezeSpec(0.34539, 12)))
    rho = rotate(photon_subtract(sq), math.pi / 2)
    grid = np.linspace(0.01, 2.0, 200)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        best = max(fidelity_to_cat(rho, a, "odd") for a in grid)
    assert best > 0.99


@settings(max_examples=30)
@given(st.floats(min_value=0, max_value=2 * math.pi))
def test_rotation_keeps_populations(theta):
    rho = ket_to_density(coherent_ket(0.8 + 0.3j, 10))
    out = rotate(rho, theta)
    np.testing.assert_allclose(out.populations, rho.populations, atol=1e-14)
    back = rotate(out, -theta)
    np.testing.assert_allclose(back.elements, rho.elements, atol=1e-13)
