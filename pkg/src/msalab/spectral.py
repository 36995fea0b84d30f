"""Spectra, resolvent blocks and time evolution for finite volumes.

Two routes to a resolvent block are provided: column solves of
``(H - E) u = e_j`` (banded LU in one dimension, sparse LU otherwise) and
the dense eigen-decomposition. A third, ``dense_green_block_norm``, inverts
the dense matrix and exists only as an oracle for the other two.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .ensemble import FiniteVolumeOperator
from .errors import CapacityError, NumericalError, SingularEnergyError

DENSE_CAP = 20_000
SINGULAR_RTOL = 1e-12
RESIDUAL_RTOL = 1e-8


@dataclass(frozen=True)
class SpectralData:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = field(default=None, repr=False)
    residual_bound: float = 0.0

    @property
    def norm(self) -> float:
        return float(np.abs(self.eigenvalues).max())


def _check_cap(op: FiniteVolumeOperator, cap: int) -> None:
    if op.n > cap:
        raise CapacityError(f"matrix dimension {op.n} exceeds the dense cap {cap}")


def eigenvalues(op: FiniteVolumeOperator, cap: int = DENSE_CAP) -> np.ndarray:
    _check_cap(op, cap)
    if op.n == 1:
        return op.diagonal.copy()
    if op.tridiagonal:
        return sla.eigvalsh_tridiagonal(op.diagonal, -np.ones(op.n - 1))
    return np.linalg.eigvalsh(op.dense())


def spectrum(op: FiniteVolumeOperator, vectors: bool = True, cap: int = DENSE_CAP) -> SpectralData:
    _check_cap(op, cap)
    if not vectors:
        return SpectralData(eigenvalues(op, cap))
    if op.n == 1:
        w, V = op.diagonal.copy(), np.ones((1, 1))
    elif op.tridiagonal:
        w, V = sla.eigh_tridiagonal(op.diagonal, -np.ones(op.n - 1))
    else:
        w, V = np.linalg.eigh(op.dense())
    resid = np.linalg.norm(op.matrix @ V - V * w, axis=0).max()
    scale = max(1.0, float(np.abs(w).max()))
    if resid > RESIDUAL_RTOL * scale:
        raise NumericalError(f"eigenpair residual {resid:.3e} above {RESIDUAL_RTOL:g}*||H||")
    return SpectralData(w, V, float(resid))


def spectral_dist(op_or_evals, E: float) -> float:
    w = op_or_evals.eigenvalues if isinstance(op_or_evals, SpectralData) else (
        eigenvalues(op_or_evals) if isinstance(op_or_evals, FiniteVolumeOperator) else np.asarray(op_or_evals))
    return float(np.abs(w - E).min())


def singular_threshold(evals: np.ndarray) -> float:
    return SINGULAR_RTOL * max(1.0, float(np.abs(evals).max()))


@dataclass(frozen=True)
class GreenBlockRequest:
    operator: FiniteVolumeOperator
    energy: float
    row_set: np.ndarray
    col_set: np.ndarray


def _solve_columns(op: FiniteVolumeOperator, E: float, cols: np.ndarray) -> np.ndarray:
    n = op.n
    B = np.zeros((n, len(cols)))
    B[cols, np.arange(len(cols))] = 1.0
    if op.tridiagonal and n > 1:
        ab = np.empty((3, n))
        ab[0, 0] = 0.0
        ab[0, 1:] = -1.0
        ab[1] = op.diagonal - E
        ab[2, :-1] = -1.0
        ab[2, -1] = 0.0
        return sla.solve_banded((1, 1), ab, B, check_finite=False)
    A = (op.matrix - E * sp.identity(n, format="csr")).tocsc()
    return spla.splu(A).solve(B)


def green_block(op: FiniteVolumeOperator, E: float, rows, cols, *,
                evals: np.ndarray | None = None, spectral: SpectralData | None = None,
                method: str = "solve") -> np.ndarray:
    """The ``rows x cols`` block of ``(H - E)^{-1}``.

    Raises ``SingularEnergyError`` when ``E`` is within
    ``1e-12 * max(1, ||H||)`` of the spectrum.
    """
    rows = np.asarray(rows, dtype=np.intp)
    cols = np.asarray(cols, dtype=np.intp)
    if spectral is not None:
        evals = spectral.eigenvalues
    if evals is None:
        evals = eigenvalues(op)
    dist = float(np.abs(evals - E).min())
    if dist < singular_threshold(evals):
        raise SingularEnergyError(f"E={E!r} is within {dist:.3e} of the spectrum")
    if method == "eigen":
        if spectral is None or spectral.eigenvectors is None:
            spectral = spectrum(op)
        V = spectral.eigenvectors
        return (V[rows] / (spectral.eigenvalues - E)) @ V[cols].T
    if method != "solve":
        raise ValueError(f"unknown method {method!r}")
    return _solve_columns(op, E, cols)[rows]


def block_norm(block: np.ndarray) -> float:
    if block.size == 0:
        return 0.0
    return float(np.linalg.svd(block, compute_uv=False)[0])


def green_block_norm(req: GreenBlockRequest | FiniteVolumeOperator, E: float | None = None,
                     rows=None, cols=None, **kw) -> float:
    if isinstance(req, GreenBlockRequest):
        op, E, rows, cols = req.operator, req.energy, req.row_set, req.col_set
    else:
        op = req
    return block_norm(green_block(op, E, rows, cols, **kw))


def dense_green_block_norm(op: FiniteVolumeOperator, E: float, rows, cols) -> float:
    """Oracle: invert ``H - E`` densely and take the block's top singular value."""
    R = np.linalg.inv(op.dense() - E * np.eye(op.n))
    return block_norm(R[np.ix_(np.asarray(rows), np.asarray(cols))])


def evolve(spectral: SpectralData, psi: np.ndarray, t: float | np.ndarray) -> np.ndarray:
    """``exp(-i t H) psi``; a vector of times gives one column per time."""
    V, w = spectral.eigenvectors, spectral.eigenvalues
    if V is None:
        raise ValueError("evolution needs eigenvectors")
    c = V.T @ psi
    t = np.asarray(t, dtype=float)
    if t.ndim == 0:
        if t == 0:
            return np.asarray(psi, dtype=complex).copy()
        return V @ (np.exp(-1j * w * t) * c)
    return V @ (np.exp(-1j * np.outer(w, t)) * c[:, None])
