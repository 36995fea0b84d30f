"""Regularity of boxes, scale schedules and the bootstrap multiscale pipeline.

A box ``Lambda_L(x)`` with ``L`` in 6N is judged by the belt-to-core norm
``||Gamma_{x,L} R(E) chi_{x,L/3}||``. Three thresholds are used:

* suitable(theta):        ``L^-theta``
* subexp-suitable(zeta):  ``exp(-L^zeta)``
* regular(m):             ``exp(-m L / 2)``

Energies numerically inside the spectrum are never regular.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from enum import Enum

import numpy as np

from .ensemble import BoundaryCondition, DisorderModel, FiniteVolumeOperator, hamiltonian
from .errors import DomainError, SingularEnergyError, ValidationError
from .geometry import BoxSpec, Separation, nonoverlapping, require_6n, snap_6n
from .montecarlo import FAIL, INCONCLUSIVE, PASS, MonteCarloEstimate, map_trials
from .spectral import eigenvalues, green_block, block_norm, singular_threshold, spectrum


class Kind(str, Enum):
    SUITABLE = "suitable"
    SUBEXP = "subexp"
    REGULAR = "regular"


@dataclass(frozen=True)
class RegularityParams:
    kind: Kind
    value: float
    energy: float

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind is Kind.SUBEXP and not 0 < self.value < 1:
            raise DomainError("sub-exponential exponent must lie in (0, 1)")
        if self.value <= 0:
            raise DomainError(f"{self.kind.value} parameter must be positive")

    def threshold(self, L: int) -> float:
        return math.exp(self.log_threshold(L))

    def log_threshold(self, L: int) -> float:
        if self.kind is Kind.SUITABLE:
            return -self.value * math.log(L)
        if self.kind is Kind.SUBEXP:
            return -(L ** self.value)
        return -self.value * L / 2.0

    def as_regular(self, L: int) -> "RegularityParams":
        if self.kind is Kind.SUITABLE:
            return Regular(suitable_to_regular_mass(self.value, L), self.energy)
        if self.kind is Kind.SUBEXP:
            return Regular(subexp_to_regular_mass(self.value, L), self.energy)
        return self


def Suitable(theta: float, energy: float) -> RegularityParams:
    return RegularityParams(Kind.SUITABLE, theta, energy)


def SubexpSuitable(zeta: float, energy: float) -> RegularityParams:
    return RegularityParams(Kind.SUBEXP, zeta, energy)


def Regular(m: float, energy: float) -> RegularityParams:
    return RegularityParams(Kind.REGULAR, m, energy)


def suitable_to_regular_mass(theta: float, L: float) -> float:
    if L < 2 or theta <= 0:
        raise DomainError("need L >= 2 and theta > 0")
    return 2.0 * theta * math.log(L) / L


def subexp_to_regular_mass(zeta: float, L: float) -> float:
    return 2.0 * L ** (zeta - 1.0)


def mass_from_norm(norm: float, L: int) -> float:
    return -2.0 * math.log(norm) / L if norm > 0 else math.inf


class Verdict(str, Enum):
    REGULAR = "regular"
    SINGULAR = "singular"
    IN_SPECTRUM = "energy_in_spectrum"


@dataclass(frozen=True)
class RegularityVerdict:
    norm_value: float
    threshold: float
    spectral_distance: float
    verdict: Verdict

    @property
    def regular(self) -> bool:
        return self.verdict is Verdict.REGULAR


def belt_core_indices(box: BoxSpec) -> tuple[np.ndarray, np.ndarray]:
    require_6n(box)
    return box.belt_indices(), box.indices_in(box.core())


def belt_core_norm(op: FiniteVolumeOperator, E: float, evals: np.ndarray | None = None) -> tuple[float, float]:
    """``(norm, dist)``; the norm is ``inf`` when ``E`` is on the spectrum."""
    rows, cols = belt_core_indices(op.box)
    if evals is None:
        evals = eigenvalues(op)
    dist = float(np.abs(evals - E).min())
    try:
        return block_norm(green_block(op, E, rows, cols, evals=evals)), dist
    except SingularEnergyError:
        return math.inf, dist


def classify_box(op: FiniteVolumeOperator, params: RegularityParams,
                 evals: np.ndarray | None = None) -> RegularityVerdict:
    L = op.box.side
    norm, dist = belt_core_norm(op, params.energy, evals)
    thr = params.threshold(L)
    if not math.isfinite(norm):
        v = Verdict.IN_SPECTRUM
    else:
        v = Verdict.REGULAR if norm <= thr else Verdict.SINGULAR
    return RegularityVerdict(norm, thr, dist, v)


def origin(dim: int) -> tuple[int, ...]:
    return (0,) * dim


@dataclass(frozen=True)
class _SingularTrial:
    model: DisorderModel
    box: BoxSpec
    params: RegularityParams
    bc: BoundaryCondition

    def __call__(self, t: int) -> bool:
        op = hamiltonian(self.model, self.box, t, self.bc)
        return not classify_box(op, self.params).regular


def _estimate(fn, trials: int, deterministic: bool, workers: int, first_trial: int = 0) -> MonteCarloEstimate:
    if trials < 1:
        raise DomainError("trials must be >= 1")
    if deterministic:
        # Nonrandom operator: one evaluation is the exact probability.
        hit = bool(fn(first_trial))
        return MonteCarloEstimate.from_counts(trials if hit else 0, trials, exact=True)
    flags = map_trials(fn, range(first_trial, first_trial + trials), workers)
    return MonteCarloEstimate.from_counts(int(sum(bool(f) for f in flags)), trials)


def estimate_singular_prob(model: DisorderModel, L: int, params: RegularityParams, trials: int,
                           sep: Separation | None = None, *, dim: int = 1,
                           bc=BoundaryCondition.DIRICHLET, workers: int = 1,
                           first_trial: int = 0) -> MonteCarloEstimate:
    """Fraction of trials in which ``Lambda_L(0)`` is not regular (in-spectrum counts as singular)."""
    box = BoxSpec(origin(dim), L)
    require_6n(box)
    fn = _SingularTrial(model, box, params, BoundaryCondition(bc))
    return _estimate(fn, trials, model.deterministic, workers, first_trial)


# -- energy intervals ---------------------------------------------------------

def delta_window(L0: int, m0: float, m0_prime: float, s: float) -> float:
    """Half-width of the energy window over which an ``m0``-regular box stays ``m0'``-regular."""
    return (math.exp(-m0_prime * L0 / 2) - math.exp(-m0 * L0 / 2)) / (2.0 * L0 ** (2 * s))


@dataclass(frozen=True)
class IntervalCertificate:
    certified: bool
    energies: np.ndarray = field(repr=False)
    cell_ok: np.ndarray = field(repr=False)
    norms: np.ndarray = field(repr=False)
    dists: np.ndarray = field(repr=False)


def _norms_on_grid(op: FiniteVolumeOperator, energies: np.ndarray):
    rows, cols = belt_core_indices(op.box)
    if op.tridiagonal:
        evals, spec = eigenvalues(op), None
    else:
        spec = spectrum(op)
        evals = spec.eigenvalues
    tol = singular_threshold(evals)
    norms = np.empty(len(energies))
    dists = np.empty(len(energies))
    for i, E in enumerate(energies):
        d = float(np.abs(evals - E).min())
        dists[i] = d
        if d < tol:
            norms[i] = math.inf
            continue
        if spec is None:
            norms[i] = block_norm(green_block(op, E, rows, cols, evals=evals))
        else:
            norms[i] = block_norm(green_block(op, E, rows, cols, spectral=spec, method="eigen"))
    return norms, dists


def certify_interval_regularity(op: FiniteVolumeOperator, m: float, interval, grid_n: int = 8,
                                s: float = 2.5) -> IntervalCertificate:
    """Certify ``(m, E)``-regularity for every ``E`` in ``interval``.

    The interval is split into ``grid_n`` equal cells and checked at their
    centres ``E_g``. A cell of radius ``r`` is accepted when
    ``dist(sigma, E_g) > L^-s`` and the first resolvent identity bound
    ``N(E_g) + r / (d_g (d_g - r))`` stays under ``exp(-m L / 2)``.
    Any failure makes the whole interval uncertified.
    """
    if grid_n < 2:
        raise DomainError("grid_n must be >= 2")
    lo, hi = float(interval[0]), float(interval[1])
    if hi < lo:
        raise DomainError("empty energy interval")
    L = op.box.side
    h = (hi - lo) / grid_n
    energies = lo + (np.arange(grid_n) + 0.5) * h
    if h == 0:
        energies = energies[:1]
    r = h / 2
    norms, dists = _norms_on_grid(op, energies)
    thr = math.exp(-m * L / 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        pad = np.where(dists > r, r / (dists * (dists - r)), np.inf)
        if r == 0:
            pad = np.zeros_like(dists)
    ok = (dists > L ** (-s)) & np.isfinite(norms) & (norms + pad <= thr)
    return IntervalCertificate(bool(ok.all()), energies, ok, norms, dists)


@dataclass(frozen=True)
class _TwoBoxTrial:
    model: DisorderModel
    boxes: tuple[BoxSpec, BoxSpec]
    m: float
    interval: tuple[float, float]
    grid_n: int
    s: float
    bc: BoundaryCondition

    def __call__(self, t: int) -> tuple[bool, bool, bool]:
        certs = [certify_interval_regularity(hamiltonian(self.model, b, t, self.bc), self.m,
                                             self.interval, self.grid_n, self.s) for b in self.boxes]
        a, b = (~c.cell_ok for c in certs)
        return bool(a.any()), bool(b.any()), bool((a & b).any())


def two_box_statistics(model: DisorderModel, m: float, L: int, interval, x, y, trials: int,
                       sep: Separation = Separation(), *, grid_n: int = 8, s: float = 2.5,
                       bc=BoundaryCondition.DIRICHLET, workers: int = 1) -> dict[str, MonteCarloEstimate]:
    """Single-box and joint failure estimates for the pair ``Lambda_L(x)``, ``Lambda_L(y)``."""
    bx, by = BoxSpec(tuple(np.atleast_1d(x)), L), BoxSpec(tuple(np.atleast_1d(y)), L)
    require_6n(bx)
    gap = np.abs(np.asarray(bx.center) - np.asarray(by.center)).max()
    if not gap > L + sep.rho:
        raise DomainError(f"|x - y| = {gap} must exceed L + rho = {L + sep.rho}")
    fn = _TwoBoxTrial(model, (bx, by), m, (float(interval[0]), float(interval[1])), grid_n, s,
                      BoundaryCondition(bc))
    if model.deterministic:
        flags = [fn(0)] * trials
        exact = True
    else:
        flags = map_trials(fn, range(trials), workers)
        exact = False
    arr = np.array(flags, dtype=bool).reshape(-1, 3)
    names = ("x", "y", "both")
    return {k: MonteCarloEstimate.from_counts(int(arr[:, i].sum()), trials, exact) for i, k in enumerate(names)}


def estimate_two_box_fail(model: DisorderModel, m: float, L: int, interval, x, y, trials: int,
                          sep: Separation = Separation(), **kw) -> MonteCarloEstimate:
    return two_box_statistics(model, m, L, interval, x, y, trials, sep, **kw)["both"]


# -- fitted masses -----------------------------------------------------------

@dataclass(frozen=True)
class _MassTrial:
    model: DisorderModel
    box: BoxSpec
    E: float
    bc: BoundaryCondition

    def __call__(self, t: int) -> float:
        norm, _ = belt_core_norm(hamiltonian(self.model, self.box, t, self.bc), self.E)
        return mass_from_norm(norm, self.box.side) if math.isfinite(norm) else -math.inf


def trial_masses(model: DisorderModel, E: float, L: int, trials: int, *, dim: int = 1,
                 bc=BoundaryCondition.DIRICHLET, workers: int = 1) -> np.ndarray:
    """Per-trial ``-2 ln(norm) / L``; ``-inf`` marks energies on the spectrum."""
    fn = _MassTrial(model, BoxSpec(origin(dim), L), E, BoundaryCondition(bc))
    if model.deterministic:
        return np.full(trials, fn(0))
    return np.array(map_trials(fn, range(trials), workers))


@dataclass(frozen=True)
class FittedMass:
    median: float
    minimum: float
    regular_trials: int


def fitted_mass(model: DisorderModel, E: float, L: int, trials: int, **kw) -> FittedMass:
    if trials < 1:
        raise DomainError("trials must be >= 1")
    ms = trial_masses(model, E, L, trials, **kw)
    ok = ms[np.isfinite(ms)]
    if ok.size == 0:
        return FittedMass(math.nan, math.nan, 0)
    return FittedMass(float(np.median(ok)), float(ok.min()), int(ok.size))


# -- schedules and admissibility --------------------------------------------

@dataclass(frozen=True)
class MSAParams:
    theta: float = 4.0
    p: float = 1.0
    p_prime: float = 1.5
    s: float = 2.5
    theta_prime: float = 3.5
    alpha: float = 1.25
    Y: int = 11
    b: int = 1
    d: int = 1
    rho: int = 0
    zeta0: float = 0.7
    zeta1: float = 0.5
    zeta2: float = 0.3

    def to_dict(self) -> dict:
        return asdict(self)


def admissibility(params: MSAParams, *, interval_stage: bool = False, subexp: bool = True) -> list[str]:
    """Every violated parameter inequality, each naming its chain."""
    P = params
    th, p, pp, s, thp, a, b, d = P.theta, P.p, P.p_prime, P.s, P.theta_prime, P.alpha, P.b, P.d
    bd = b * d
    out = []

    def need(cond, chain, detail):
        if not cond:
            out.append(f"violates {chain}: {detail}")

    need(th > bd, "θ > bd", f"θ={th} ≤ bd={bd}")
    need(0 < p < pp, "0 < p < p′", f"p={p}, p′={pp}")
    need(pp < th - bd, "p′ < θ − bd", f"p′={pp} ≥ θ − bd={th - bd}")
    need(a > 1, "1 < α", f"α={a}")
    need(a < (2 * p + 2 * d) / (p + 2 * d), "α < (2p+2d)/(p+2d)",
         f"α={a} ≥ {(2 * p + 2 * d) / (p + 2 * d):.6g}")
    if p + bd > 0:
        need(a < th / (p + bd), "α < θ/(p+bd)", f"α={a} ≥ {th / (p + bd):.6g}")
    need(th / 2 < thp, "θ/2 < θ′", f"θ′={thp} ≤ θ/2={th / 2}")
    need(p + bd < s, "p + bd < s", f"s={s} ≤ p + bd={p + bd}")
    need(a * s < thp, "αs < θ′", f"αs={a * s:.6g} ≥ θ′={thp}")
    need(thp < th, "θ′ < θ", f"θ′={thp} ≥ θ={th}")
    if interval_stage:
        need(th > 2 * p + (b + 1) * d, "θ > 2p + (b+1)d", f"θ={th} ≤ {2 * p + (b + 1) * d}")
    if subexp:
        z0, z1, z2 = P.zeta0, P.zeta1, P.zeta2
        need(0 < z2 < z1 < z0 < 1, "0 < ζ2 < ζ1 < ζ0 < 1", f"ζ=({z0}, {z1}, {z2})")
        if z1 > 0:
            need(a < z0 / z1, "α < ζ0/ζ1", f"α={a} ≥ {z0 / z1:.6g}")
    need(int(P.Y) == P.Y and P.Y % 2 == 1 and P.Y >= 11, "Y odd ≥ 11", f"Y={P.Y}")
    need(P.rho >= 0 and int(P.rho) == P.rho, "ϱ ∈ {0, 1, 2, ...}", f"ϱ={P.rho}")
    return out


@dataclass(frozen=True)
class ScheduleConfig:
    mode: str = "power"            # "power" or "geometric"
    L0: int = 12
    alpha: float = 1.25
    Y: int = 11
    cap: int = 300
    msa_grade: bool = False
    params: MSAParams = field(default_factory=MSAParams)
    interval_stage: bool = False


@dataclass(frozen=True)
class ScaleSchedule:
    mode: str
    L0: int
    scales: tuple[int, ...]
    factor: float
    params: MSAParams

    def to_dict(self) -> dict:
        return {"mode": self.mode, "L0": self.L0, "scales": list(self.scales),
                "factor": self.factor, "params": self.params.to_dict()}


def build_schedule(cfg: ScheduleConfig) -> ScaleSchedule:
    if cfg.L0 % 6 or cfg.L0 < 6:
        raise ValidationError([f"violates L0 ∈ 6N: L0={cfg.L0}"])
    if cfg.msa_grade:
        diags = admissibility(replace(cfg.params, alpha=cfg.alpha, Y=cfg.Y),
                              interval_stage=cfg.interval_stage)
        if diags:
            raise ValidationError(diags)
    scales = [cfg.L0]
    if cfg.mode == "geometric":
        if int(cfg.Y) != cfg.Y or cfg.Y % 2 == 0 or cfg.Y < 11:
            raise ValidationError([f"violates Y odd ≥ 11: Y={cfg.Y}"])
        while scales[-1] * cfg.Y <= cfg.cap:
            scales.append(scales[-1] * int(cfg.Y))
        factor = float(cfg.Y)
    elif cfg.mode == "power":
        if not cfg.alpha > 1:
            raise ValidationError([f"violates 1 < α: α={cfg.alpha}"])
        while True:
            nxt = snap_6n(scales[-1] ** cfg.alpha)
            if nxt > cfg.cap:
                break
            if nxt <= scales[-1]:
                raise DomainError(f"schedule stalls at L={scales[-1]} for α={cfg.alpha}")
            scales.append(nxt)
        factor = float(cfg.alpha)
    else:
        raise DomainError(f"unknown schedule mode {cfg.mode!r}")
    return ScaleSchedule(cfg.mode, cfg.L0, tuple(scales), factor, cfg.params)


def subexp_Y(zeta0: float, Y: int = 11) -> int:
    """Smallest odd integer at least ``max(Y, 11^(1/(1-zeta0)))``."""
    y = max(float(Y), 11.0 ** (1.0 / (1.0 - zeta0)))
    n = int(math.ceil(y - 1e-9))
    return n if n % 2 else n + 1


# -- the bootstrap pipeline --------------------------------------------------

@dataclass(frozen=True)
class BootstrapConfig:
    L0: int = 12
    params: MSAParams = field(default_factory=MSAParams)
    trials: int = 4000
    cap: int = 300
    dim: int = 1
    grid_n: int = 4
    halt_on_entry_fail: bool = True
    workers: int = 1

    def to_dict(self) -> dict:
        d = asdict(self)
        d["params"] = self.params.to_dict()
        return d


@dataclass
class ScaleCheck:
    stage: int
    label: str
    scale: int
    quantity: str
    estimate: MonteCarloEstimate
    threshold: float
    verdict: str

    def to_dict(self) -> dict:
        return {"stage": self.stage, "label": self.label, "scale": self.scale, "quantity": self.quantity,
                "fail_threshold": self.threshold, "verdict": self.verdict, **self.estimate.to_dict()}


@dataclass
class StageReport:
    stage: int
    name: str
    scales: list[int]
    checks: list[ScaleCheck] = field(default_factory=list)
    info: dict = field(default_factory=dict)
    halted: bool = False

    @property
    def verdict(self) -> str:
        vs = [c.verdict for c in self.checks]
        if FAIL in vs:
            return FAIL
        if INCONCLUSIVE in vs:
            return INCONCLUSIVE
        return PASS

    def to_dict(self) -> dict:
        return {"stage": self.stage, "name": self.name, "scales": self.scales, "verdict": self.verdict,
                "halted": self.halted, "info": self.info, "checks": [c.to_dict() for c in self.checks]}


def format_reports(reports: list[StageReport]) -> str:
    head = f"{'stage':>5}  {'check':<14} {'L':>5}  {'p_fail':>10}  {'ci95_hi':>10}  {'threshold':>11}  verdict"
    lines = [head, "-" * len(head)]
    for r in reports:
        for c in r.checks:
            lines.append(f"{c.stage:>5}  {c.label:<14} {c.scale:>5}  {c.estimate.p_hat:>10.3e}  "
                         f"{c.estimate.ci95[1]:>10.3e}  {c.threshold:>11.4e}  {c.verdict}")
        if r.halted:
            lines.append(f"{r.stage:>5}  pipeline halted: entry hypothesis failed")
    return "\n".join(lines)


def _check(stage, label, L, quantity, est: MonteCarloEstimate, thr: float) -> ScaleCheck:
    return ScaleCheck(stage, label, L, quantity, est, thr, est.below(thr))


@dataclass(frozen=True)
class _CertTrial:
    model: DisorderModel
    box: BoxSpec
    m: float
    interval: tuple[float, float]
    grid_n: int
    s: float

    def __call__(self, t: int) -> bool:
        op = hamiltonian(self.model, self.box, t)
        return not certify_interval_regularity(op, self.m, self.interval, self.grid_n, self.s).certified


def _cert_fail(model, L, m, interval, cfg: BootstrapConfig) -> MonteCarloEstimate:
    fn = _CertTrial(model, BoxSpec(origin(cfg.dim), L), m, interval, cfg.grid_n, cfg.params.s)
    return _estimate(fn, cfg.trials, model.deterministic, cfg.workers)


def mass_quantile(masses: np.ndarray, q: float) -> float:
    """Largest ``m`` with at most a fraction ``q`` of trials below it."""
    ms = np.sort(masses)
    k = int(math.floor(q * len(ms)))
    return float(ms[min(k, len(ms) - 1)])


def run_bootstrap(model: DisorderModel, E0: float, cfg: BootstrapConfig = BootstrapConfig()) -> list[StageReport]:
    P = cfg.params
    d = cfg.dim
    diags = admissibility(P)
    if cfg.L0 % 6:
        diags.append(f"violates L0 ∈ 6N: L0={cfg.L0}")
    if d != P.d:
        diags.append(f"dimension mismatch: config d={d}, params d={P.d}")
    if diags:
        raise ValidationError(diags)
    T, W = cfg.trials, cfg.workers

    def single(L, params):
        return estimate_singular_prob(model, L, params, T, dim=d, workers=W)

    reports: list[StageReport] = []

    # Stage 1: suitability along L_{k+1} = Y L_k.
    s1 = build_schedule(ScheduleConfig("geometric", cfg.L0, Y=P.Y, cap=cfg.cap, params=P))
    r1 = StageReport(1, "suitability, geometric scales", list(s1.scales))
    est0 = single(cfg.L0, Suitable(P.theta, E0))
    r1.checks.append(_check(1, "hypH2", cfg.L0, "P(not θ-suitable)", est0, (3 * P.Y - 4) ** (-2.0 * d)))
    r1.checks.append(_check(1, "hypH", cfg.L0, "P(not θ-suitable)", est0, 841.0 ** (-d)))
    reports.append(r1)
    if cfg.halt_on_entry_fail and any(c.verdict == FAIL for c in r1.checks):
        r1.halted = True
        return reports
    for L in s1.scales[1:]:
        r1.checks.append(_check(1, "x11", L, "P(not θ-suitable)", single(L, Suitable(P.theta, E0)), L ** -P.p))

    # Stage 2: regularity with mass m0/2 along L_{k+1} = [L_k^α]_6N.
    s2 = build_schedule(ScheduleConfig("power", cfg.L0, alpha=P.alpha, cap=cfg.cap, params=P))
    L0 = cfg.L0
    m0 = suitable_to_regular_mass(P.theta, L0)
    m0p = suitable_to_regular_mass(P.theta_prime, L0)
    delta1 = delta_window(L0, m0, m0p, P.s)
    I1 = (E0 - delta1, E0 + delta1)
    r2 = StageReport(2, "regularity with scale-dependent mass, power scales", list(s2.scales),
                     info={"m0": m0, "m0_prime": m0p, "delta1": delta1})
    r2.checks.append(_check(2, "p1", L0, "P(not m0-regular)", single(L0, Regular(m0, E0)), L0 ** -P.p_prime))
    r2.checks.append(_check(2, "stat222", L0, "P(not m0′-regular on I(δ1))",
                            _cert_fail(model, L0, m0p, I1, cfg), L0 ** -P.p))
    masses = []
    for L in s2.scales:
        r2.checks.append(_check(2, "p111th", L, "P(not m0/2-regular on I(δ1))",
                                _cert_fail(model, L, m0 / 2, I1, cfg), L ** -P.p))
        ms = trial_masses(model, E0, L, T, dim=d, workers=W)
        masses.append(mass_quantile(ms, L ** -P.p))
    drops = float(sum(a - b for a, b in zip(masses, masses[1:])))
    r2.info.update({
        "descendant_masses": masses,
        "mass_drop_sum": drops,
        "mass_budget": m0p - m0 / 2,
        "mass_ledger_ok": bool(drops <= m0p - m0 / 2 and min(masses) >= m0 / 2),
    })
    reports.append(r2)

    # Stage 3: sub-exponential suitability, geometric scales with a larger Y.
    Y3 = subexp_Y(P.zeta0, P.Y)
    s3 = build_schedule(ScheduleConfig("geometric", cfg.L0, Y=Y3, cap=cfg.cap, params=P))
    r3 = StageReport(3, "sub-exponential suitability, geometric scales", list(s3.scales), info={"Y": Y3})
    e3 = single(L0, SubexpSuitable(P.zeta0, E0))
    r3.checks.append(_check(3, "hyp1_subexp", L0, "P(not ζ0-subexp-suitable)", e3, (3 * Y3 - 4) ** (-2.0 * d)))
    r3.checks.append(_check(3, "xxk_subexp", L0, "P(not ζ0-subexp-suitable)", e3, math.exp(-L0 ** P.zeta1)))
    for L in s3.scales[1:]:
        r3.checks.append(_check(3, "xxk_subexp", L, "P(not ζ0-subexp-suitable)",
                                single(L, SubexpSuitable(P.zeta0, E0)), math.exp(-L ** P.zeta1)))
    reports.append(r3)

    # Stage 4: two-box events with sub-exponential bounds.
    s4 = build_schedule(ScheduleConfig("power", cfg.L0, alpha=P.alpha, cap=cfg.cap, params=P))
    m4 = subexp_to_regular_mass(P.zeta0, L0)
    delta2 = delta_window(L0, m4, 0.75 * m4, P.s)
    I2 = (E0 - delta2, E0 + delta2)
    r4 = StageReport(4, "two-box events, power scales", list(s4.scales),
                     info={"m0": m4, "delta2": delta2})
    r4.checks.append(_check(4, "p1_subexp", L0, "P(not 2L0^(ζ0-1)-regular)",
                            single(L0, Regular(m4, E0)), math.exp(-L0 ** P.zeta1)))
    for L in s4.scales:
        x = origin(d)
        y = (L + P.rho + 1,) + (0,) * (d - 1)
        est = estimate_two_box_fail(model, m4 / 2, L, I2, x, y, T, Separation(P.rho),
                                    grid_n=cfg.grid_n, s=P.s, workers=W)
        r4.checks.append(_check(4, "msres_subexp", L, "P(R(m0/2, L, I, x, y)^c)", est, math.exp(-L ** P.zeta2)))
    reports.append(r4)
    return reports


def entry_thresholds(Y: int = 11, d: int = 1) -> dict[str, float]:
    """Success-probability thresholds of the two stage-1 entry hypotheses."""
    return {"hypH": 1.0 - 841.0 ** (-d), "hypH2": 1.0 - (3 * Y - 4) ** (-2.0 * d)}


__all__ = [
    "Kind", "RegularityParams", "Suitable", "SubexpSuitable", "Regular", "Verdict", "RegularityVerdict",
    "classify_box", "suitable_to_regular_mass", "subexp_to_regular_mass", "estimate_singular_prob",
    "certify_interval_regularity", "estimate_two_box_fail", "two_box_statistics", "build_schedule",
    "ScheduleConfig", "ScaleSchedule", "MSAParams", "admissibility", "run_bootstrap", "BootstrapConfig",
    "StageReport", "fitted_mass", "delta_window", "MonteCarloEstimate", "nonoverlapping",
]
