"""Experiment configuration: YAML in, validated dataclasses out."""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .ensemble import DisorderModel, _DISTRIBUTIONS
from .errors import ValidationError
from .msa import MSAParams, admissibility

EXPERIMENTS = ("wegner", "ne", "msa", "bootstrap", "sli", "edi", "decay", "dynamics", "correlator",
               "lyapunov", "oracle")

# Per-experiment parameter blocks; anything not listed here is rejected.
DEFAULTS: dict[str, dict] = {
    "wegner": {"energy": 2.0, "eta_list": [1e-3, 3e-3, 1e-2, 3e-2], "scale_list": [12, 24, 48]},
    "ne": {"interval": [1.5, 2.5], "scale_list": [12, 24, 48]},
    "msa": {"energy": 0.0, "scale_list": [12, 36], "kind": "suitable", "value": 4.0, "two_box": False,
            "grid_n": 8},
    "bootstrap": {"energy": 0.0, "L0": 12, "cap": 300, "grid_n": 4, "halt_on_entry_fail": True,
                  "interval_stage": False},
    "sli": {"energy": 0.5, "scale_list": [36, 72], "boundary": "exterior"},
    "edi": {"scale_list": [36, 72], "interval": None, "boundary": "exterior"},
    "decay": {"L": 216, "interval": [-0.5, 0.5], "lyapunov_steps": 0},
    "dynamics": {"L": 216, "interval": [-100.0, 100.0], "n": 2.0, "t_max": 1e4, "per_decade": 20,
                 "t_early": 10.0},
    "correlator": {"L": 216, "interval": [-0.5, 0.5]},
    "lyapunov": {"energies": [0.0], "steps": 100000, "batches": 20},
    "oracle": {"instances": 50, "max_side": 12, "couplings": [0.0, 1.0, 8.0], "dims": [1, 2],
               "rtol": 1e-9},
}


@dataclass
class ExperimentConfig:
    experiment: str
    model: DisorderModel = field(default_factory=DisorderModel)
    dim: int = 1
    trials: int = 100
    workers: int = 1
    out: str = "runs/out"
    params: dict = field(default_factory=dict)
    msa: MSAParams = field(default_factory=MSAParams)

    def block(self) -> dict:
        """Experiment parameters with defaults filled in."""
        merged = copy.deepcopy(DEFAULTS.get(self.experiment, {}))
        merged.update(self.params)
        return merged

    def to_dict(self) -> dict:
        return {"experiment": self.experiment, "model": self.model.to_dict(), "dim": self.dim,
                "trials": self.trials, "workers": self.workers, "out": self.out, "params": self.block(),
                "msa": self.msa.to_dict()}


def _model(d: dict | None, errors: list[str]) -> DisorderModel:
    d = d or {}
    try:
        return DisorderModel.from_dict(d)
    except Exception as exc:
        errors.append(f"model: {exc}")
        return DisorderModel()


def _msa(d: dict | None, errors: list[str]) -> MSAParams:
    d = dict(d or {})
    known = set(MSAParams.__dataclass_fields__)
    for k in sorted(set(d) - known):
        errors.append(f"msa: unknown field {k!r}")
        d.pop(k)
    try:
        return MSAParams(**d)
    except TypeError as exc:
        errors.append(f"msa: {exc}")
        return MSAParams()


def from_dict(raw: dict) -> ExperimentConfig:
    """Build a config; structural problems raise ``ValidationError`` listing all of them."""
    if "config" in raw and "files" in raw:       # a run manifest
        raw = raw["config"]
    errors: list[str] = []
    known = {"experiment", "model", "dim", "trials", "workers", "out", "params", "msa"}
    for k in sorted(set(raw) - known):
        errors.append(f"unknown field {k!r}")
    cfg = ExperimentConfig(
        experiment=str(raw.get("experiment", "")),
        model=_model(raw.get("model"), errors),
        dim=raw.get("dim", 1),
        trials=raw.get("trials", 100),
        workers=raw.get("workers", 1),
        out=str(raw.get("out", "runs/out")),
        params=dict(raw.get("params") or {}),
        msa=_msa(raw.get("msa"), errors),
    )
    if errors:
        raise ValidationError(errors + validate(cfg))
    return cfg


def load(path) -> ExperimentConfig:
    text = Path(path).read_text()
    raw = json.loads(text) if str(path).endswith(".json") else yaml.safe_load(text)
    if not isinstance(raw, dict):
        raise ValidationError([f"{path}: top level must be a mapping"])
    return from_dict(raw)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _interval_ok(v) -> bool:
    return (isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(a, (int, float)) for a in v)
            and math.isfinite(v[0]) and math.isfinite(v[1]) and v[0] <= v[1])


def validate(cfg: ExperimentConfig) -> list[str]:
    """Every violated constraint; empty iff the config can run."""
    out: list[str] = []
    if cfg.experiment not in EXPERIMENTS:
        out.append(f"experiment must be one of {EXPERIMENTS}, got {cfg.experiment!r}")
        return out
    if not _is_int(cfg.dim) or not 1 <= cfg.dim <= 3:
        out.append(f"dim must be 1, 2 or 3, got {cfg.dim!r}")
    if not _is_int(cfg.trials) or cfg.trials < 1:
        out.append(f"trials must be a positive integer, got {cfg.trials!r}")
    if not _is_int(cfg.workers) or cfg.workers < 1:
        out.append(f"workers must be a positive integer, got {cfg.workers!r}")
    if cfg.model.distribution not in _DISTRIBUTIONS:
        out.append(f"model.distribution must be one of {_DISTRIBUTIONS}")
    unknown = sorted(set(cfg.params) - set(DEFAULTS[cfg.experiment]))
    out += [f"params: unknown field {k!r} for {cfg.experiment}" for k in unknown]
    p = cfg.block()
    exp = cfg.experiment
    one_d = {"sli", "edi", "lyapunov"}
    if exp in one_d and cfg.dim != 1:
        out.append(f"{exp} runs in d=1 only")

    def scales(key, six=False):
        v = p.get(key)
        if not isinstance(v, list) or not v or not all(_is_int(L) and L >= 4 and L % 2 == 0 for L in v):
            out.append(f"params.{key} must be a nonempty list of even integers >= 4")
        elif six and any(L % 6 for L in v):
            out.append(f"params.{key}: every scale must lie in 6N")

    if exp == "wegner":
        scales("scale_list")
        if not all(isinstance(e, (int, float)) and 0 < e <= 1 for e in p["eta_list"] or [None]):
            out.append("params.eta_list: every eta must lie in (0, 1]")
        if cfg.trials < 100 and cfg.model.coupling > 0:
            out.append("wegner needs trials >= 100")
    elif exp == "ne":
        scales("scale_list")
        if not _interval_ok(p["interval"]):
            out.append("params.interval must be [lo, hi] with lo <= hi")
    elif exp == "msa":
        scales("scale_list", six=True)
        if p["kind"] not in ("suitable", "subexp", "regular"):
            out.append("params.kind must be suitable, subexp or regular")
        elif p["kind"] == "subexp" and not 0 < p["value"] < 1:
            out.append("params.value: subexp exponent must lie in (0, 1)")
        elif not p["value"] > 0:
            out.append("params.value must be positive")
    elif exp == "bootstrap":
        if not _is_int(p["L0"]) or p["L0"] < 6 or p["L0"] % 6:
            out.append(f"params.L0 must lie in 6N, got {p['L0']!r}")
        if cfg.msa.d != cfg.dim:
            out.append(f"msa.d={cfg.msa.d} differs from dim={cfg.dim}")
        out += admissibility(cfg.msa, interval_stage=bool(p["interval_stage"]))
    elif exp == "sli":
        scales("scale_list", six=True)
    elif exp == "edi":
        scales("scale_list", six=True)
        if p["interval"] is not None and not _interval_ok(p["interval"]):
            out.append("params.interval must be null or [lo, hi]")
    elif exp in ("decay", "dynamics", "correlator"):
        if not _is_int(p["L"]) or p["L"] < 12 or p["L"] % 2:
            out.append("params.L must be an even integer >= 12")
        if not _interval_ok(p["interval"]):
            out.append("params.interval must be [lo, hi] with lo <= hi")
        if exp == "dynamics" and not p["t_max"] > 0.1:
            out.append("params.t_max must exceed 0.1")
    elif exp == "lyapunov":
        if not _is_int(p["steps"]) or not _is_int(p["batches"]) or p["steps"] < p["batches"] or p["batches"] < 2:
            out.append("params.steps must be >= params.batches >= 2")
    elif exp == "oracle":
        if not _is_int(p["instances"]) or p["instances"] < 1:
            out.append("params.instances must be a positive integer")
    return out
