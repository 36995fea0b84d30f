"""Random environments and finite-volume Anderson Hamiltonians.

Site potentials are drawn from a counter-based generator (numpy's Philox):
the key is ``(master_seed, trial_id)`` and the counter encodes the site
coordinate, so the value at a site never depends on which region asked for
it. Disjoint regions therefore see independent values and overlapping
regions agree where they overlap.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.sparse as sp
from numpy.random import Philox
from scipy import stats

from .errors import DomainError
from .geometry import BoxSpec

_OFFSET = 1 << 63
_MASK64 = (1 << 64) - 1
_DISTRIBUTIONS = ("uniform", "bernoulli", "uniform01")


@dataclass(frozen=True)
class DisorderModel:
    """i.i.d. single-site disorder ``lambda * omega_i``.

    ``distribution`` is ``"uniform"`` (on [-1, 1]), ``"bernoulli"`` (+-1 with
    equal weight) or ``"uniform01"`` (on [0, 1]).
    """

    coupling: float = 1.0
    distribution: str = "uniform"
    master_seed: int = 0

    def __post_init__(self):
        if self.coupling < 0:
            raise DomainError("coupling must be nonnegative")
        if self.distribution not in _DISTRIBUTIONS:
            raise DomainError(f"unknown distribution {self.distribution!r}; expected one of {_DISTRIBUTIONS}")
        if not 0 <= int(self.master_seed) <= _MASK64:
            raise DomainError("master_seed must fit in 64 bits")

    @property
    def deterministic(self) -> bool:
        return self.coupling == 0

    @property
    def has_bounded_density(self) -> bool:
        return self.distribution in ("uniform", "uniform01")

    @property
    def support(self) -> tuple[float, float]:
        return {"uniform": (-1.0, 1.0), "bernoulli": (-1.0, 1.0), "uniform01": (0.0, 1.0)}[self.distribution]

    def to_dict(self) -> dict:
        return {"coupling": float(self.coupling), "distribution": self.distribution,
                "master_seed": int(self.master_seed)}

    @classmethod
    def from_dict(cls, d: dict) -> "DisorderModel":
        return cls(float(d.get("coupling", 1.0)), str(d.get("distribution", "uniform")),
                   int(d.get("master_seed", 0)))

    def with_coupling(self, coupling: float) -> "DisorderModel":
        return DisorderModel(coupling, self.distribution, self.master_seed)


def _raw_row(seed: int, trial_id: int, start: int, n: int, lead: tuple[int, ...]) -> np.ndarray:
    ctr = np.zeros(4, dtype=np.uint64)
    ctr[0] = (start + _OFFSET) & _MASK64
    for k, c in enumerate(lead[:2]):
        ctr[1 + k] = (c + _OFFSET) & _MASK64
    key = np.array([seed & _MASK64, trial_id & _MASK64], dtype=np.uint64)
    return Philox(counter=ctr, key=key).random_raw(4 * n)[::4]


def _to_values(raw: np.ndarray, distribution: str) -> np.ndarray:
    if distribution == "bernoulli":
        return np.where(raw >> np.uint64(63), 1.0, -1.0)
    u = (raw >> np.uint64(11)).astype(np.float64) * 2.0 ** -53
    if distribution == "uniform":
        return 2.0 * u - 1.0
    return u


def site_values(model: DisorderModel, points: np.ndarray, trial_id: int) -> np.ndarray:
    """``omega`` at arbitrary lattice points (rows of ``points``)."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.int64))
    if pts.shape[1] > 3:
        raise DomainError("per-site generation supports d <= 3")
    out = np.empty(len(pts))
    for i, p in enumerate(pts):
        raw = _raw_row(model.master_seed, trial_id, int(p[-1]), 1, tuple(int(c) for c in p[:-1]))
        out[i] = _to_values(raw, model.distribution)[0]
    return out


def line_values(model: DisorderModel, start: int, n: int, trial_id: int) -> np.ndarray:
    """``omega`` on the 1D sites ``start, ..., start + n - 1``."""
    return _to_values(_raw_row(model.master_seed, trial_id, start, n, ()), model.distribution)


@dataclass(frozen=True)
class EnvironmentSample:
    region: BoxSpec
    values: np.ndarray = field(repr=False)
    trial_id: int

    def value_at(self, site) -> float:
        return float(self.values[self.region.index_of(site)[0]])

    def restrict(self, box: BoxSpec) -> "EnvironmentSample":
        return EnvironmentSample(box, self.values[self.region.indices_in(box)], self.trial_id)


def sample_environment(model: DisorderModel, region: BoxSpec, trial_id: int) -> EnvironmentSample:
    d = region.dim
    if d > 3:
        raise DomainError("per-site generation supports d <= 3")
    r = region.radius
    n = region.side - 1
    lo = [c - r for c in region.center]
    rows = []
    # Lexicographic order: the last coordinate runs fastest, one Philox row per prefix.
    for prefix in itertools.product(*[range(l, l + n) for l in lo[:-1]]):
        raw = _raw_row(model.master_seed, trial_id, lo[-1], n, prefix)
        rows.append(_to_values(raw, model.distribution))
    return EnvironmentSample(region, np.concatenate(rows), int(trial_id))


class BoundaryCondition(str, Enum):
    DIRICHLET = "dirichlet"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class FiniteVolumeOperator:
    box: BoxSpec
    bc: BoundaryCondition
    matrix: sp.csr_matrix = field(repr=False)
    coupling: float
    diagonal: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def tridiagonal(self) -> bool:
        return self.box.dim == 1 and self.bc is BoundaryCondition.DIRICHLET

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def norm_bound(self) -> float:
        """Gershgorin bound on the operator norm."""
        return float(abs(self.matrix).sum(axis=1).max())


def _bonds(box: BoxSpec, periodic: bool):
    n = box.side - 1
    idx = np.arange(box.n_sites).reshape((n,) * box.dim)
    src, dst = [], []
    for ax in range(box.dim):
        a = np.moveaxis(idx, ax, 0)
        src.append(a[:-1].ravel())
        dst.append(a[1:].ravel())
        if periodic:
            src.append(a[-1].ravel())
            dst.append(a[0].ravel())
    return np.concatenate(src), np.concatenate(dst)


def assemble(sample: EnvironmentSample, bc=BoundaryCondition.DIRICHLET,
             model: DisorderModel | None = None, coupling: float | None = None) -> FiniteVolumeOperator:
    """``H = -Delta + lambda * V`` restricted to ``sample.region``.

    The discrete Laplacian convention is ``(-Delta psi)(x) = sum_e (psi(x) - psi(x+e))``.
    """
    bc = BoundaryCondition(bc)
    if coupling is None:
        coupling = model.coupling if model is not None else 1.0
    box = sample.region
    diag = 2.0 * box.dim + coupling * sample.values
    src, dst = _bonds(box, bc is BoundaryCondition.PERIODIC)
    rows = np.concatenate([np.arange(box.n_sites), src, dst])
    cols = np.concatenate([np.arange(box.n_sites), dst, src])
    vals = np.concatenate([diag, -np.ones(2 * len(src))])
    H = sp.coo_matrix((vals, (rows, cols)), shape=(box.n_sites,) * 2).tocsr()
    H.sum_duplicates()
    return FiniteVolumeOperator(box, bc, H, float(coupling), np.asarray(H.diagonal()))


def hamiltonian(model: DisorderModel, box: BoxSpec, trial_id: int,
                bc=BoundaryCondition.DIRICHLET) -> FiniteVolumeOperator:
    return assemble(sample_environment(model, box, trial_id), bc, model)


@dataclass(frozen=True)
class CovarianceReport:
    statistic: float
    critical_1pct: float
    trials: int

    @property
    def passed(self) -> bool:
        return self.statistic < self.critical_1pct


def check_covariance(model: DisorderModel, box: BoxSpec, shift, trials: int,
                     bc=BoundaryCondition.DIRICHLET) -> CovarianceReport:
    """Two-sample KS statistic between spectra of a box and its translate.

    The critical value uses the trial count rather than the pooled eigenvalue
    count, since eigenvalues of one trial are not independent.
    """
    from .spectral import eigenvalues

    shifted = box.translated(shift)
    a = np.concatenate([eigenvalues(hamiltonian(model, box, t, bc)) for t in range(trials)])
    b = np.concatenate([eigenvalues(hamiltonian(model, shifted, t, bc)) for t in range(trials)])
    stat = float(stats.ks_2samp(a, b).statistic)
    crit = 1.628 * np.sqrt(2.0 / trials)
    return CovarianceReport(stat, float(crit), trials)
