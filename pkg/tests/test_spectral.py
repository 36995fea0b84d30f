import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from msalab.ensemble import BoundaryCondition, DisorderModel, hamiltonian
from msalab.errors import CapacityError, SingularEnergyError
from msalab.geometry import BoxSpec
from msalab.spectral import (dense_green_block_norm, eigenvalues, evolve, green_block, green_block_norm,
                             spectral_dist, spectrum)


def op(L=12, d=1, lam=1.0, trial=0, bc=BoundaryCondition.DIRICHLET):
    return hamiltonian(DisorderModel(lam, "uniform", 5), BoxSpec((0,) * d, L), trial, bc)


def test_free_chain_l4():
    w = eigenvalues(op(4, lam=0.0))
    assert np.allclose(w, [2 - np.sqrt(2), 2, 2 + np.sqrt(2)])


@given(st.integers(2, 6).map(lambda k: 2 * k), st.integers(1, 2), st.sampled_from([0.0, 1.0, 8.0]),
       st.integers(0, 99))
@settings(max_examples=30, deadline=None)
def test_eigenvalues_match_dense(L, d, lam, trial):
    H = op(L, d, lam, trial)
    assert np.allclose(eigenvalues(H), np.linalg.eigvalsh(H.dense()), atol=1e-10)
    sd = spectrum(H)
    assert sd.residual_bound < 1e-8 * max(1.0, sd.norm)
    assert np.allclose(sd.eigenvectors.T @ sd.eigenvectors, np.eye(H.n), atol=1e-10)


@given(st.integers(2, 6).map(lambda k: 2 * k), st.integers(1, 2), st.sampled_from([0.0, 1.0, 8.0]),
       st.integers(0, 99), st.floats(-3, 20))
@settings(max_examples=40, deadline=None)
def test_green_block_paths_agree(L, d, lam, trial, E):
    H = op(L, d, lam, trial)
    box = H.box
    rows, cols = box.belt_indices(), np.arange(H.n)
    try:
        a = green_block(H, E, rows, cols)
    except SingularEnergyError:
        return
    b = green_block(H, E, rows, cols, method="eigen")
    ref = np.linalg.inv(H.dense() - E * np.eye(H.n))[np.ix_(rows, cols)]
    scale = np.abs(ref).max()
    assert np.allclose(a, ref, rtol=1e-8, atol=1e-9 * scale)
    assert np.allclose(b, ref, rtol=1e-6, atol=1e-8 * scale)
    n1 = green_block_norm(H, E, rows, cols)
    n2 = dense_green_block_norm(H, E, rows, cols)
    assert abs(n1 - n2) <= 1e-9 * n2


@given(st.integers(2, 6).map(lambda k: 2 * k), st.sampled_from([0.0, 1.0, 8.0]), st.integers(0, 99),
       st.floats(-3, 12))
@settings(max_examples=30, deadline=None)
def test_full_block_norm_is_inverse_distance(L, lam, trial, E):
    H = op(L, 1, lam, trial)
    try:
        n = green_block_norm(H, E, np.arange(H.n), np.arange(H.n))
    except SingularEnergyError:
        return
    dist = spectral_dist(H, E)
    assert abs(n * dist - 1) < 1e-9


def test_singular_energy_raises():
    H = op(8, lam=0.0)
    with pytest.raises(SingularEnergyError):
        green_block(H, 2.0, [0], [1])


def test_periodic_uses_sparse_path():
    H = op(8, 1, 1.0, 3, BoundaryCondition.PERIODIC)
    assert not H.tridiagonal
    n1 = green_block_norm(H, 0.3, [0], np.arange(H.n))
    assert abs(n1 - dense_green_block_norm(H, 0.3, [0], np.arange(H.n))) < 1e-10 * n1


def test_capacity_cap():
    with pytest.raises(CapacityError):
        eigenvalues(op(12, 2), cap=50)


def test_evolve_identity_and_unitarity():
    H = op(20, 1, 1.0, 0)
    sd = spectrum(H)
    psi = np.zeros(H.n)
    psi[9] = 1.0
    assert np.array_equal(evolve(sd, psi, 0.0), psi.astype(complex))
    out = evolve(sd, psi, np.array([0.5, 3.0, 40.0]))
    assert np.allclose(np.linalg.norm(out, axis=0), 1.0)
    # matches the matrix exponential
    from scipy.linalg import expm
    assert np.allclose(out[:, 1], expm(-3.0j * H.dense()) @ psi, atol=1e-10)
