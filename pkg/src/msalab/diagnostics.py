"""Empirical checks of the finite-volume hypotheses and of localization.

On the lattice the Simon-Lieb and eigenfunction-decay inequalities come out
of the geometric resolvent identity, whose hopping term couples the inner
belt of a sub-box to the layer of sites just outside it. The ratios below
therefore put that exterior layer on the big-box side by default
(``boundary="exterior"``); ``boundary="interior"`` uses the inner belt on
both sides instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ensemble import (BoundaryCondition, DisorderModel, EnvironmentSample, assemble, hamiltonian,
                       line_values, sample_environment)
from .errors import DomainError, SingularEnergyError
from .geometry import BoxSpec, Separation, exterior_layer, is_inside_thick, nonoverlapping, thick_margin
from .montecarlo import MonteCarloEstimate, map_trials
from .spectral import block_norm, eigenvalues, green_block, spectrum

NOISE_FLOOR = 1e-12


def _trial_rng(model: DisorderModel, trial_id: int, tag: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([model.master_seed, trial_id, tag]))


def _boundary_sites(box: BoxSpec, boundary: str) -> np.ndarray:
    if boundary == "exterior":
        return exterior_layer(box)
    if boundary == "interior":
        return box.sites[box.belt_mask]
    raise ValueError(f"unknown boundary {boundary!r}")


# -- SLI ---------------------------------------------------------------------

def sli_ratio(sample: EnvironmentSample, outer: BoxSpec, inner: BoxSpec, cell: BoxSpec, E: float,
              model: DisorderModel, boundary: str = "exterior") -> float:
    """``||G R_out chi_cell|| / (||G_in R_in chi_cell|| * ||G_out R_out G_in^+||)``."""
    if not (is_inside_thick(cell, inner) and is_inside_thick(inner, outer)):
        raise DomainError("need cell ⊏ inner ⊏ outer")
    H_out = assemble(sample.restrict(outer), model=model)
    H_in = assemble(sample.restrict(inner), model=model)
    belt_out = outer.belt_indices()
    num = block_norm(green_block(H_out, E, belt_out, outer.indices_in(cell)))
    a = block_norm(green_block(H_in, E, inner.belt_indices(), inner.indices_in(cell)))
    b = block_norm(green_block(H_out, E, belt_out, outer.index_of(_boundary_sites(inner, boundary))))
    if num == 0:
        return 0.0
    return num / (a * b)


@dataclass(frozen=True)
class _SliTrial:
    model: DisorderModel
    L: int
    ell_prime: int
    ell_pp: int
    E: float
    boundary: str

    def __call__(self, t: int) -> float:
        rng = _trial_rng(self.model, t, 1)
        outer = BoxSpec((0,), self.L)
        m1 = thick_margin(self.ell_prime, self.L)
        inner = BoxSpec((int(rng.integers(-m1, m1 + 1)),), self.ell_prime)
        m2 = thick_margin(self.ell_pp, self.ell_prime)
        cell = BoxSpec((inner.center[0] + int(rng.integers(-m2, m2 + 1)),), self.ell_pp)
        sample = sample_environment(self.model, outer, t)
        try:
            return sli_ratio(sample, outer, inner, cell, self.E, self.model, self.boundary)
        except SingularEnergyError:
            return math.nan


@dataclass(frozen=True)
class RatioScan:
    scale: int
    ratios: np.ndarray = field(repr=False)

    @property
    def maximum(self) -> float:
        return float(np.nanmax(self.ratios))

    @property
    def median(self) -> float:
        return float(np.nanmedian(self.ratios))

    @property
    def skipped(self) -> int:
        return int(np.isnan(self.ratios).sum())


def sli_scan(model: DisorderModel, L: int, E: float, trials: int, *, ell_prime: int | None = None,
             ell_pp: int | None = None, boundary: str = "exterior", workers: int = 1) -> RatioScan:
    """SLI ratios over random nested placements in d=1; ``gamma_hat`` is the maximum."""
    ell_prime = ell_prime or L // 3
    ell_pp = ell_pp or max(2, (ell_prime // 3) // 2 * 2)
    fn = _SliTrial(model, L, ell_prime, ell_pp, E, boundary)
    return RatioScan(L, np.array(map_trials(fn, range(trials), workers), dtype=float))


# -- EDI ---------------------------------------------------------------------

def edi_ratio_vector(probe_op, big_box: BoxSpec, psi: np.ndarray, E: float,
                     boundary: str = "exterior") -> float:
    """``|psi(x)| / (||G R_probe(E) chi_x|| * ||G^+ psi||)`` with ``x`` the probe centre."""
    probe = probe_op.box
    x = big_box.index_of(probe.center)[0]
    num = abs(psi[x])
    if num == 0:
        return 0.0
    g = block_norm(green_block(probe_op, E, probe.belt_indices(), probe.index_of(probe.center)))
    layer = big_box.index_of(_boundary_sites(probe, boundary))
    return float(num / (g * np.linalg.norm(psi[layer])))


def edi_ratio(sample: EnvironmentSample, big_box: BoxSpec, probe_box: BoxSpec, eigen_index: int,
              model: DisorderModel, boundary: str = "exterior", spectral=None) -> float:
    if not is_inside_thick(probe_box, big_box):
        raise DomainError("need probe ⊏ big box")
    if spectral is None:
        spectral = spectrum(assemble(sample.restrict(big_box), model=model))
    E = float(spectral.eigenvalues[eigen_index])
    psi = spectral.eigenvectors[:, eigen_index]
    probe_op = assemble(sample.restrict(probe_box), model=model)
    return edi_ratio_vector(probe_op, big_box, psi, E, boundary)


@dataclass(frozen=True)
class _EdiTrial:
    model: DisorderModel
    L: int
    ell: int
    interval: tuple[float, float] | None
    boundary: str

    def __call__(self, t: int) -> float:
        rng = _trial_rng(self.model, t, 2)
        big = BoxSpec((0,), self.L)
        sample = sample_environment(self.model, big, t)
        spec = spectrum(assemble(sample, model=self.model))
        idx = np.arange(len(spec.eigenvalues))
        if self.interval is not None:
            lo, hi = self.interval
            idx = idx[(spec.eigenvalues >= lo) & (spec.eigenvalues <= hi)]
        if idx.size == 0:
            return math.nan
        j = int(rng.choice(idx))
        m = thick_margin(self.ell, self.L)
        probe = BoxSpec((int(rng.integers(-m, m + 1)),), self.ell)
        try:
            return edi_ratio(sample, big, probe, j, self.model, self.boundary, spectral=spec)
        except SingularEnergyError:
            return math.nan


def edi_scan(model: DisorderModel, L: int, trials: int, *, ell: int | None = None, interval=None,
             boundary: str = "exterior", workers: int = 1) -> RatioScan:
    """EDI ratios in d=1 for a random eigenpair and a random probe box per trial."""
    ell = ell or L // 3
    fn = _EdiTrial(model, L, ell, None if interval is None else tuple(interval), boundary)
    return RatioScan(L, np.array(map_trials(fn, range(trials), workers), dtype=float))


# -- Wegner and NE -----------------------------------------------------------

@dataclass(frozen=True)
class _EvalTrial:
    model: DisorderModel
    box: BoxSpec
    bc: BoundaryCondition = BoundaryCondition.DIRICHLET

    def __call__(self, t: int) -> np.ndarray:
        return eigenvalues(hamiltonian(self.model, self.box, t, self.bc))


def _spectra(model, box, trials, workers):
    fn = _EvalTrial(model, box)
    if model.deterministic:
        return [fn(0)] * trials
    return map_trials(fn, range(trials), workers)


def _lstsq(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    ss = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid ** 2).sum()) / ss if ss > 0 else 1.0
    return coef, r2


@dataclass
class WegnerCurve:
    energy: float
    eta_list: list[float]
    scale_list: list[int]
    estimates: list[list[MonteCarloEstimate]]     # [eta][scale]
    eta_slope: float = math.nan
    scale_exponent: float = math.nan
    r2: float = math.nan

    @property
    def p_hat(self) -> np.ndarray:
        return np.array([[e.p_hat for e in row] for row in self.estimates])

    def rows(self) -> list[dict]:
        out = []
        for i, eta in enumerate(self.eta_list):
            for j, L in enumerate(self.scale_list):
                e = self.estimates[i][j]
                out.append({"eta": eta, "L": L, **e.to_dict()})
        return out


def wegner_scan(model: DisorderModel, E: float, eta_list, scale_list, trials: int, *, dim: int = 1,
                workers: int = 1) -> WegnerCurve:
    """``P{dist(sigma(H_L), E) <= eta}`` on an ``eta x L`` grid with a log-log fit.

    The fit is ``log p = c + a log eta + b log L`` over cells with
    ``0 < p_hat < 1``.
    """
    eta_list = [float(e) for e in eta_list]
    if any(not 0 < e <= 1 for e in eta_list):
        raise DomainError("eta must lie in (0, 1]")
    if trials < 100 and not model.deterministic:
        raise DomainError("wegner_scan needs at least 100 trials")
    est = [[None] * len(scale_list) for _ in eta_list]
    for j, L in enumerate(scale_list):
        dists = np.array([np.abs(w - E).min() for w in _spectra(model, BoxSpec((0,) * dim, L), trials, workers)])
        for i, eta in enumerate(eta_list):
            est[i][j] = MonteCarloEstimate.from_counts(int((dists <= eta).sum()), trials, model.deterministic)
    curve = WegnerCurve(float(E), eta_list, list(scale_list), est)
    X, y = [], []
    for i, eta in enumerate(eta_list):
        for j, L in enumerate(scale_list):
            p = est[i][j].p_hat
            if 0 < p < 1:
                X.append([1.0, math.log(eta), math.log(L)])
                y.append(math.log(p))
    if len(y) >= 3 and len({r[1] for r in X}) > 1 and len({r[2] for r in X}) > 1:
        coef, r2 = _lstsq(np.array(X), np.array(y))
        curve.eta_slope, curve.scale_exponent, curve.r2 = float(coef[1]), float(coef[2]), r2
    return curve


def ne_scan(model: DisorderModel, interval, scale_list, trials: int, *, dim: int = 1,
            workers: int = 1) -> list[dict]:
    """Mean eigenvalue count in ``interval`` per trial, and that count over ``L^d``."""
    lo, hi = interval
    if not hi >= lo:
        raise DomainError("interval must be compact and nonempty")
    rows = []
    for L in scale_list:
        counts = np.array([((w >= lo) & (w <= hi)).sum()
                           for w in _spectra(model, BoxSpec((0,) * dim, L), trials, workers)], dtype=float)
        mean = float(counts.mean())
        se = float(counts.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
        rows.append({"L": L, "trials": trials, "mean_count": mean, "stderr": se,
                     "ratio": mean / L ** dim})
    return rows


# -- eigenvalue-distance events ---------------------------------------------

def spectra_distance(a: np.ndarray, b: np.ndarray) -> float:
    if a.size == 0 or b.size == 0:
        return math.inf
    b = np.sort(b)
    pos = np.clip(np.searchsorted(b, a), 1, len(b) - 1) if len(b) > 1 else np.zeros(len(a), dtype=int)
    d = np.abs(a - b[pos])
    if len(b) > 1:
        d = np.minimum(d, np.abs(a - b[pos - 1]))
    return float(d.min())


@dataclass(frozen=True)
class _PairTrial:
    model: DisorderModel
    a: BoxSpec
    b: BoxSpec
    window: tuple[float, float] | None

    def __call__(self, t: int) -> float:
        wa = eigenvalues(hamiltonian(self.model, self.a, t))
        wb = eigenvalues(hamiltonian(self.model, self.b, t))
        if self.window is not None:
            lo, hi = self.window
            wa = wa[(wa >= lo) & (wa <= hi)]
            wb = wb[(wb >= lo) & (wb <= hi)]
        return spectra_distance(wa, wb)


def pair_spectra_distances(model: DisorderModel, a: BoxSpec, b: BoxSpec, trials: int, *,
                           sep: Separation = Separation(), window=None, workers: int = 1) -> np.ndarray:
    if not nonoverlapping(a, b, sep):
        raise DomainError("boxes must be nonoverlapping")
    fn = _PairTrial(model, a, b, None if window is None else tuple(window))
    if model.deterministic:
        return np.full(trials, fn(0))
    return np.array(map_trials(fn, range(trials), workers))


def eigenvalue_distance_event(model: DisorderModel, a: BoxSpec, b: BoxSpec, eta: float, trials: int,
                              **kw) -> MonteCarloEstimate:
    """``P{dist(sigma(H_a), sigma(H_b)) <= eta}`` for nonoverlapping boxes."""
    d = pair_spectra_distances(model, a, b, trials, **kw)
    return MonteCarloEstimate.from_counts(int((d <= eta).sum()), trials, model.deterministic)


# -- eigenfunction decay -----------------------------------------------------

@dataclass(frozen=True)
class DecayProfile:
    center: tuple[int, ...]
    radii: np.ndarray = field(repr=False)
    log_norm: np.ndarray = field(repr=False)
    fitted_rate: float
    fit_quality: float
    energy: float = math.nan


def decay_profile(box: BoxSpec, psi: np.ndarray, *, center=None, floor: float = NOISE_FLOOR,
                  min_radii: int = 5, energy: float = math.nan) -> DecayProfile | None:
    """Envelope ``ln max_{|x-x0| >= r} |psi(x)|`` and its decay rate.

    ``x0`` defaults to the site of largest modulus. Radii where the envelope
    has sunk below ``floor`` (eigenvector round-off) are dropped, and the rate
    is the negated least-squares slope over the outer half of the rest.
    Returns ``None`` when fewer than ``min_radii`` radii survive.
    """
    amp = np.abs(psi)
    i0 = int(np.argmax(amp)) if center is None else int(box.index_of(center)[0])
    x0 = box.sites[i0]
    dist = np.abs(box.sites - x0).max(axis=1)
    rmax = int(dist.max())
    shell = np.zeros(rmax + 1)
    np.maximum.at(shell, dist, amp)
    env = np.maximum.accumulate(shell[::-1])[::-1]
    radii = np.arange(rmax + 1)
    keep = env > floor
    radii, env = radii[keep], env[keep]
    if len(radii) < min_radii:
        return None
    logn = np.log(env)
    tail = slice(len(radii) // 2, None)
    X = np.stack([np.ones(len(radii[tail])), radii[tail].astype(float)], axis=1)
    coef, r2 = _lstsq(X, logn[tail])
    return DecayProfile(tuple(int(c) for c in x0), radii, logn, float(-coef[1]), r2, energy)


@dataclass(frozen=True)
class _DecayTrial:
    model: DisorderModel
    box: BoxSpec
    interval: tuple[float, float]

    def __call__(self, t: int) -> list[DecayProfile]:
        spec = spectrum(hamiltonian(self.model, self.box, t))
        lo, hi = self.interval
        out = []
        for j in np.flatnonzero((spec.eigenvalues >= lo) & (spec.eigenvalues <= hi)):
            prof = decay_profile(self.box, spec.eigenvectors[:, j], energy=float(spec.eigenvalues[j]))
            if prof is not None:
                out.append(prof)
        return out


@dataclass
class DecaySummary:
    profiles: list[DecayProfile]

    @property
    def rates(self) -> np.ndarray:
        return np.array([p.fitted_rate for p in self.profiles])

    @property
    def median_rate(self) -> float:
        return float(np.median(self.rates)) if self.profiles else math.nan


def eigenfunction_decay(model: DisorderModel, box: BoxSpec, interval, trials: int, *,
                        workers: int = 1) -> DecaySummary:
    if box.side < 12:
        raise DomainError("box too small for a decay profile")
    fn = _DecayTrial(model, box, (float(interval[0]), float(interval[1])))
    ntr = 1 if model.deterministic else trials
    profiles = [p for ps in map_trials(fn, range(ntr), workers) for p in ps]
    return DecaySummary(profiles)


# -- dynamics ----------------------------------------------------------------

@dataclass
class MomentTrace:
    times: np.ndarray
    moments: np.ndarray
    cesaro: float
    t_early: float

    @property
    def maximum(self) -> float:
        return float(self.moments.max())

    def value_at(self, t: float) -> float:
        return float(np.interp(t, self.times, self.moments))

    @property
    def late_early_ratio(self) -> float:
        late = self.moments[self.times >= self.t_early]
        return float(late.max() / self.value_at(self.t_early))

    def rows(self) -> list[dict]:
        return [{"t": float(t), "M": float(m)} for t, m in zip(self.times, self.moments)]

    def loglog_slope(self, t_lo: float, t_hi: float) -> float:
        sel = (self.times >= t_lo) & (self.times <= t_hi)
        X = np.stack([np.ones(sel.sum()), np.log(self.times[sel])], axis=1)
        coef, _ = _lstsq(X, np.log(self.moments[sel]))
        return float(coef[1])


def log_time_grid(t_max: float, per_decade: int = 20, t_min: float = 0.1) -> np.ndarray:
    n = int(round(per_decade * math.log10(t_max / t_min))) + 1
    return np.concatenate([[0.0], np.geomspace(t_min, t_max, n)])


def _moment_single(spec, box: BoxSpec, interval, n: float, psi0: np.ndarray, times: np.ndarray):
    lo, hi = interval
    sel = (spec.eigenvalues >= lo) & (spec.eigenvalues <= hi)
    V, w = spec.eigenvectors[:, sel], spec.eigenvalues[sel]
    c = V.T @ psi0
    r2 = ((box.sites - np.asarray(box.center)) ** 2).sum(axis=1)
    weight = (1.0 + r2) ** (n / 2.0)
    moments = np.empty(len(times))
    for k in range(0, len(times), 64):
        phase = np.exp(-1j * np.outer(w, times[k:k + 64]))
        phi = V @ (phase * c[:, None])
        moments[k:k + 64] = weight @ np.abs(phi) ** 2
    cesaro = float(weight @ ((V ** 2) @ (c ** 2)))
    return moments, cesaro


@dataclass(frozen=True)
class _MomentTrial:
    model: DisorderModel
    box: BoxSpec
    interval: tuple[float, float]
    n: float
    psi0: np.ndarray
    times: np.ndarray

    def __call__(self, t: int):
        spec = spectrum(hamiltonian(self.model, self.box, t))
        return _moment_single(spec, self.box, self.interval, self.n, self.psi0, self.times)


def delta_state(box: BoxSpec, site=None) -> np.ndarray:
    psi = np.zeros(box.n_sites)
    psi[box.index_of(box.center if site is None else site)[0]] = 1.0
    return psi


def dynamical_moment(model: DisorderModel, box: BoxSpec, interval, n: float, psi0: np.ndarray | None,
                     t_grid, *, trials: int = 1, t_early: float = 10.0, workers: int = 1) -> MomentTrace:
    """Trial-averaged ``M_n(t) = ||<x>^{n/2} E(I) exp(-itH) psi0||^2`` about the box centre.

    ``cesaro`` is the infinite-time average of the same quantity.
    """
    psi0 = delta_state(box) if psi0 is None else np.asarray(psi0, dtype=float)
    times = np.asarray(t_grid, dtype=float)
    fn = _MomentTrial(model, box, (float(interval[0]), float(interval[1])), float(n), psi0, times)
    ntr = 1 if model.deterministic else trials
    res = map_trials(fn, range(ntr), workers)
    moments = np.mean([r[0] for r in res], axis=0)
    cesaro = float(np.mean([r[1] for r in res]))
    return MomentTrace(times, moments, cesaro, t_early)


# -- eigenfunction correlator -------------------------------------------------

@dataclass
class CorrelatorTable:
    distances: np.ndarray
    correlator: np.ndarray
    zeta_grid: np.ndarray
    r2_by_zeta: np.ndarray
    rate_by_zeta: np.ndarray
    best_zeta: float
    rate: float

    def _at_one(self, arr) -> float:
        k = int(np.argmin(np.abs(self.zeta_grid - 1.0)))
        return float(arr[k])

    @property
    def exponential_rate(self) -> float:
        """Rate of the plain exponential fit (``zeta = 1``)."""
        return self._at_one(self.rate_by_zeta)

    @property
    def exponential_r2(self) -> float:
        return self._at_one(self.r2_by_zeta)

    def rows(self) -> list[dict]:
        return [{"r": int(r), "Q": float(q)} for r, q in zip(self.distances, self.correlator)]


@dataclass(frozen=True)
class _CorrTrial:
    model: DisorderModel
    box: BoxSpec
    interval: tuple[float, float]

    def __call__(self, t: int) -> np.ndarray:
        spec = spectrum(hamiltonian(self.model, self.box, t))
        lo, hi = self.interval
        sel = (spec.eigenvalues >= lo) & (spec.eigenvalues <= hi)
        V = np.abs(spec.eigenvectors[:, sel])
        i0 = self.box.index_of(self.box.center)[0]
        return V @ V[i0]


def eigenfunction_correlator(spec, box: BoxSpec, interval, site=None) -> np.ndarray:
    """``Q(x, x0; I) = sum_{lambda_j in I} ||chi_x P_j chi_x0||_2`` for every site ``x``."""
    lo, hi = interval
    sel = (spec.eigenvalues >= lo) & (spec.eigenvalues <= hi)
    V = np.abs(spec.eigenvectors[:, sel])
    i0 = box.index_of(box.center if site is None else site)[0]
    return V @ V[i0]


def correlator_decay(model: DisorderModel, box: BoxSpec, interval, trials: int, *,
                     zeta_grid=None, floor: float = NOISE_FLOOR, workers: int = 1) -> CorrelatorTable:
    """Trial-averaged correlator against sup-distance from the centre, fitted as
    ``ln Q ~ c - rate * r^zeta``; the reported ``zeta`` maximizes R^2."""
    zeta_grid = np.round(np.arange(0.1, 1.51, 0.05), 10) if zeta_grid is None else np.asarray(zeta_grid)
    fn = _CorrTrial(model, box, (float(interval[0]), float(interval[1])))
    ntr = 1 if model.deterministic else trials
    Q = np.mean(map_trials(fn, range(ntr), workers), axis=0)
    dist = np.abs(box.sites - np.asarray(box.center)).max(axis=1)
    r = np.arange(dist.max() + 1)
    qr = np.array([Q[dist == k].mean() for k in r])
    keep = (r >= 1) & (qr > floor * max(qr[0], floor))
    rr, lq = r[keep].astype(float), np.log(qr[keep])
    r2s, rates = np.full(len(zeta_grid), np.nan), np.full(len(zeta_grid), np.nan)
    if len(rr) >= 3:
        for k, z in enumerate(zeta_grid):
            X = np.stack([np.ones(len(rr)), rr ** z], axis=1)
            coef, r2 = _lstsq(X, lq)
            r2s[k], rates[k] = r2, -coef[1]
    if np.all(np.isnan(r2s)):
        best, rate = math.nan, 0.0
    else:
        k = int(np.nanargmax(r2s))
        best, rate = float(zeta_grid[k]), float(rates[k])
    return CorrelatorTable(r, qr, zeta_grid, r2s, rates, best, rate)


# -- Lyapunov exponent -------------------------------------------------------

@dataclass(frozen=True)
class LyapunovEstimate:
    gamma: float
    stderr: float
    steps: int
    batches: int

    @property
    def ci95(self) -> tuple[float, float]:
        return self.gamma - 1.96 * self.stderr, self.gamma + 1.96 * self.stderr


def lyapunov_1d(model: DisorderModel, E: float, steps: int, *, trial_id: int = 0, batches: int = 20,
                burn_in: int | None = None) -> LyapunovEstimate:
    """Top Lyapunov exponent of the products of ``[[E - 2 - lambda w_k, -1], [1, 0]]``.

    The propagated vector is renormalized every step (QR on one column);
    the error bar is the batch-means standard error.
    """
    if steps < batches:
        raise DomainError("need at least one step per batch")
    burn = min(1000, steps // 100) if burn_in is None else burn_in
    a_list = (E - 2.0 - model.coupling * line_values(model, 0, steps + burn, trial_id)).tolist()
    u, v = 1.0, 0.0
    for a in a_list[:burn]:
        u, v = a * u - v, u
        nrm = math.hypot(u, v)
        u, v = u / nrm, v / nrm
    size = steps // batches
    rates = []
    for k in range(batches):
        acc = 0.0
        for a in a_list[burn + k * size: burn + (k + 1) * size]:
            u, v = a * u - v, u
            nrm = math.hypot(u, v)
            acc += math.log(nrm)
            u, v = u / nrm, v / nrm
        rates.append(acc / size)
    rates = np.array(rates)
    return LyapunovEstimate(float(rates.mean()), float(rates.std(ddof=1) / math.sqrt(batches)),
                            size * batches, batches)
