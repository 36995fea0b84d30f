"""Experiment orchestration and the on-disk result envelope.

A run writes ``data.csv`` and ``summary.json`` plus ``manifest.json``. The
manifest is first written with ``"status": "incomplete"`` and is only marked
complete after both data files have been renamed into place, so a crashed
run never looks finished. Data files depend on the config alone; timing
lives only in the manifest.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import time
from dataclasses import dataclass
from importlib.metadata import PackageNotFoundError, version as _pkg_version
from pathlib import Path

import numpy as np

from . import diagnostics as dg
from .config import ExperimentConfig, validate
from .ensemble import DisorderModel, hamiltonian
from .errors import ValidationError
from .geometry import BoxSpec, Separation
from .msa import (BootstrapConfig, Regular, SubexpSuitable, Suitable, estimate_singular_prob, format_reports,
                  run_bootstrap, two_box_statistics)
from .montecarlo import FAIL, PASS
from .spectral import dense_green_block_norm, eigenvalues, green_block_norm, spectral_dist

try:
    VERSION = _pkg_version("artifact")
except PackageNotFoundError:  # pragma: no cover
    VERSION = "0.1.0"


@dataclass
class RunResult:
    rows: list[dict]
    summary: dict
    ok: bool = True


@dataclass
class RunManifest:
    config: dict
    version: str
    master_seed: int
    wall_time_s: float
    files: dict[str, str]
    status: str = "complete"
    ok: bool = True

    def to_dict(self) -> dict:
        return {"status": self.status, "ok": self.ok, "version": self.version, "master_seed": self.master_seed,
                "wall_time_s": self.wall_time_s, "files": self.files, "config": self.config}


# -- serialization -----------------------------------------------------------

def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_clean(v) for v in x.tolist()]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def dumps_json(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def dumps_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    cols: list[str] = []
    for r in rows:
        cols += [k for k in r if k not in cols]
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _cell(r.get(k)) for k in cols})
    return buf.getvalue()


def _cell(v):
    v = _clean(v)
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return json.dumps(v)
    return v


def _atomic_write(path: Path, text: str) -> str:
    data = text.encode()
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)
    return hashlib.sha256(data).hexdigest()


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# -- experiments -------------------------------------------------------------

def _wegner(cfg: ExperimentConfig, p: dict) -> RunResult:
    c = dg.wegner_scan(cfg.model, p["energy"], p["eta_list"], p["scale_list"], cfg.trials, dim=cfg.dim,
                       workers=cfg.workers)
    return RunResult(c.rows(), {"energy": c.energy, "eta_slope": c.eta_slope,
                                "scale_exponent": c.scale_exponent, "r2": c.r2})


def _ne(cfg, p):
    rows = dg.ne_scan(cfg.model, p["interval"], p["scale_list"], cfg.trials, dim=cfg.dim, workers=cfg.workers)
    ratios = [r["ratio"] for r in rows]
    spread = (max(ratios) - min(ratios)) / max(ratios) if max(ratios) > 0 else 0.0
    return RunResult(rows, {"interval": p["interval"], "relative_spread": spread})


def _msa(cfg, p):
    rows = []
    for L in p["scale_list"]:
        E = p["energy"]
        params = {"suitable": Suitable, "subexp": SubexpSuitable, "regular": Regular}[p["kind"]](p["value"], E)
        est = estimate_singular_prob(cfg.model, L, params, cfg.trials, dim=cfg.dim, workers=cfg.workers)
        row = {"L": L, "event": "single", **est.to_dict()}
        rows.append(row)
        if p["two_box"]:
            m = params.as_regular(L).value
            y = (L + cfg.msa.rho + 1,) + (0,) * (cfg.dim - 1)
            st = two_box_statistics(cfg.model, m, L, (E, E), (0,) * cfg.dim, y, cfg.trials,
                                    Separation(cfg.msa.rho), grid_n=p["grid_n"], workers=cfg.workers)
            for k, e in st.items():
                rows.append({"L": L, "event": f"two_box_{k}", **e.to_dict()})
    return RunResult(rows, {"kind": p["kind"], "value": p["value"], "energy": p["energy"]})


def _bootstrap(cfg, p):
    bc = BootstrapConfig(L0=p["L0"], params=cfg.msa, trials=cfg.trials, cap=p["cap"], dim=cfg.dim,
                         grid_n=p["grid_n"], halt_on_entry_fail=p["halt_on_entry_fail"], workers=cfg.workers)
    reports = run_bootstrap(cfg.model, p["energy"], bc)
    rows = [c.to_dict() for r in reports for c in r.checks]
    verdicts = [r.verdict for r in reports]
    summary = {"stages": [r.to_dict() for r in reports], "table": format_reports(reports).splitlines(),
               "all_pass": all(v == PASS for v in verdicts) and len(reports) == 4}
    return RunResult(rows, summary, ok=FAIL not in verdicts)


def _ratio_rows(scans, name):
    rows = []
    for sc in scans:
        rows += [{"L": sc.scale, "trial": i, name: r} for i, r in enumerate(sc.ratios)]
    return rows


def _ratio_summary(scans):
    mx = {str(sc.scale): sc.maximum for sc in scans}
    vals = list(mx.values())
    return {"maximum": mx, "median": {str(sc.scale): sc.median for sc in scans},
            "skipped": {str(sc.scale): sc.skipped for sc in scans},
            "max_over_min": max(vals) / min(vals) if min(vals) > 0 else None}


def _sli(cfg, p):
    scans = [dg.sli_scan(cfg.model, L, p["energy"], cfg.trials, boundary=p["boundary"], workers=cfg.workers)
             for L in p["scale_list"]]
    return RunResult(_ratio_rows(scans, "ratio"), _ratio_summary(scans))


def _edi(cfg, p):
    scans = [dg.edi_scan(cfg.model, L, cfg.trials, interval=p["interval"], boundary=p["boundary"],
                         workers=cfg.workers) for L in p["scale_list"]]
    return RunResult(_ratio_rows(scans, "ratio"), _ratio_summary(scans))


def _center_energy(p) -> float:
    return 0.5 * (p["interval"][0] + p["interval"][1])


def _decay(cfg, p):
    box = BoxSpec((0,) * cfg.dim, p["L"])
    s = dg.eigenfunction_decay(cfg.model, box, p["interval"], cfg.trials, workers=cfg.workers)
    rows = [{"energy": pr.energy, "center": list(pr.center), "fitted_rate": pr.fitted_rate,
             "fit_quality": pr.fit_quality, "radii_used": len(pr.radii)} for pr in s.profiles]
    summary = {"median_rate": s.median_rate, "profiles": len(s.profiles)}
    if p["lyapunov_steps"] and cfg.dim == 1:
        ly = dg.lyapunov_1d(cfg.model, _center_energy(p), p["lyapunov_steps"])
        summary["lyapunov"] = ly.gamma
        summary["relative_gap"] = abs(s.median_rate - ly.gamma) / ly.gamma if ly.gamma > 0 else None
    return RunResult(rows, summary)


def _dynamics(cfg, p):
    box = BoxSpec((0,) * cfg.dim, p["L"])
    times = dg.log_time_grid(p["t_max"], p["per_decade"])
    tr = dg.dynamical_moment(cfg.model, box, p["interval"], p["n"], None, times, trials=cfg.trials,
                             t_early=p["t_early"], workers=cfg.workers)
    t_hi = min(100.0, p["t_max"])
    return RunResult(tr.rows(), {"maximum": tr.maximum, "cesaro": tr.cesaro,
                                 "late_early_ratio": tr.late_early_ratio,
                                 "loglog_slope_1_100": tr.loglog_slope(1.0, t_hi)})


def _correlator(cfg, p):
    box = BoxSpec((0,) * cfg.dim, p["L"])
    t = dg.correlator_decay(cfg.model, box, p["interval"], cfg.trials, workers=cfg.workers)
    return RunResult(t.rows(), {"best_zeta": t.best_zeta, "rate": t.rate,
                                "exponential_rate": t.exponential_rate, "exponential_r2": t.exponential_r2})


def _lyapunov(cfg, p):
    rows = []
    for E in p["energies"]:
        est = dg.lyapunov_1d(cfg.model, float(E), p["steps"], batches=p["batches"])
        rows.append({"energy": float(E), "gamma": est.gamma, "stderr": est.stderr, "steps": est.steps})
    return RunResult(rows, {"energies": len(rows)})


def oracle_instances(p: dict, seed: int):
    """Seeded ``(model, box, E, trial)`` tuples for the dense-vs-solve comparison."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 7]))
    for i in range(p["instances"]):
        d = int(rng.choice(p["dims"]))
        lam = float(rng.choice(p["couplings"]))
        L = int(rng.choice(np.arange(4, p["max_side"] + 1, 2)))
        model = DisorderModel(lam, "uniform", seed)
        E = float(rng.uniform(-1.0, 4.0 * d + lam + 1.0))
        yield i, model, BoxSpec((0,) * d, L), E


def oracle_suite(p: dict, seed: int) -> RunResult:
    rows, ok = [], True
    for i, model, box, E in oracle_instances(p, seed):
        op = hamiltonian(model, box, i)
        ev = eigenvalues(op)
        rows_idx = box.belt_indices()
        cols_idx = np.flatnonzero(~box.belt_mask) if box.side > 4 else np.arange(box.n_sites)
        a = green_block_norm(op, E, rows_idx, cols_idx, evals=ev)
        b = dense_green_block_norm(op, E, rows_idx, cols_idx)
        full = green_block_norm(op, E, np.arange(op.n), np.arange(op.n), evals=ev)
        inv = 1.0 / spectral_dist(ev, E)
        e1, e2 = abs(a - b) / b, abs(full - inv) / inv
        passed = bool(e1 <= p["rtol"] and e2 <= p["rtol"])
        ok &= passed
        rows.append({"instance": i, "dim": box.dim, "L": box.side, "coupling": model.coupling, "energy": E,
                     "block_rel_err": e1, "full_rel_err": e2, "pass": passed})
    return RunResult(rows, {"instances": len(rows), "all_pass": ok}, ok=ok)


def _oracle(cfg, p):
    return oracle_suite(p, cfg.model.master_seed)


DISPATCH = {"wegner": _wegner, "ne": _ne, "msa": _msa, "bootstrap": _bootstrap, "sli": _sli, "edi": _edi,
            "decay": _decay, "dynamics": _dynamics, "correlator": _correlator, "lyapunov": _lyapunov,
            "oracle": _oracle}


def compute(cfg: ExperimentConfig) -> RunResult:
    diags = validate(cfg)
    if diags:
        raise ValidationError(diags)
    return DISPATCH[cfg.experiment](cfg, cfg.block())


def run(cfg: ExperimentConfig, out: str | os.PathLike | None = None) -> RunManifest:
    """Validate, run, and write ``data.csv``, ``summary.json`` and ``manifest.json``."""
    diags = validate(cfg)
    if diags:
        raise ValidationError(diags)
    out_dir = Path(out if out is not None else cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    conf = cfg.to_dict()
    conf.pop("out")
    manifest = RunManifest(conf, VERSION, int(cfg.model.master_seed), 0.0, {}, status="incomplete")
    mpath = out_dir / "manifest.json"
    for name in ("data.csv", "summary.json"):
        (out_dir / name).unlink(missing_ok=True)
    _atomic_write(mpath, dumps_json(manifest.to_dict()))
    t0 = time.perf_counter()
    res = DISPATCH[cfg.experiment](cfg, cfg.block())
    summary = {"experiment": cfg.experiment, "ok": res.ok, **res.summary}
    manifest.files["data.csv"] = _atomic_write(out_dir / "data.csv", dumps_csv(res.rows))
    manifest.files["summary.json"] = _atomic_write(out_dir / "summary.json", dumps_json(summary))
    manifest.wall_time_s = round(time.perf_counter() - t0, 3)
    manifest.status = "complete"
    manifest.ok = res.ok
    _atomic_write(mpath, dumps_json(manifest.to_dict()))
    return manifest
