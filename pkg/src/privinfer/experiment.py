"""Monte Carlo runner for the approximate scheme.

Trial ``i`` draws everything from ``numpy.random.default_rng(seed + i)`` in a
fixed order: the weights ``w``, the data ``x``, then the perturbation ``g``.
A trial can therefore be replayed on its own with :func:`trial_transcript`.
Results do not depend on chunking or on the number of workers.

Output schemas
--------------
CSV (one row per trial, header first)::

    trial,seed,estimate,truth,abs_error,bound,bound_satisfied

JSON::

    {"config": {...}, "summary": {...}, "trials": [{<CSV columns>}, ...]}

The summary keys are listed in :data:`SUMMARY_FIELDS`. CSV runs write the
summary next to the table as ``<out>.summary.json``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .approx import GammaSpec, Transcript, count_gamma, count_gamma_members, draw_inputs, run_session, run_sessions, sample_gamma
from .bounds import error_bound, log2_int, mi_lower
from .exact import SchemeParams
from .exceptions import ParameterError
from .gf2 import bits_to_sign_rows
from .hadamard import load_hadamard

__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "run_experiment",
    "trial_transcript",
    "TRIAL_FIELDS",
    "SUMMARY_FIELDS",
    "BOUND_SLACK",
]

TRIAL_FIELDS = ("trial", "seed", "estimate", "truth", "abs_error", "bound", "bound_satisfied")
SUMMARY_FIELDS = (
    "trials",
    "violations",
    "max_error",
    "mean_error",
    "error_bound",
    "gamma_count",
    "gamma_members",
    "mi_achieved",
    "mi_achieved_members",
    "mi_lower",
    "publication_cost",
    "user_privacy",
)
# floating-point slack for the bound check, relative to 1 + |w x^T|
BOUND_SLACK = 1e-9
CHUNK = 4096


@dataclass
class ExperimentConfig:
    n: int
    t: int
    h: int = 0
    trials: int = 1000
    seed: int = 0
    x_norm: float = 1.0
    x_distribution: str = "gaussian"
    epsilon_for_bounds: Optional[float] = None
    family: str = "le"
    hadamard_path: Optional[str] = None
    output_path: Optional[str] = None
    format: str = "csv"
    n_jobs: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.trials < 0:
            raise ParameterError("trials must be non-negative")
        if self.seed < 0:
            raise ParameterError("seed must be non-negative")
        if not (self.x_norm >= 0 and math.isfinite(self.x_norm)):
            raise ParameterError("x_norm must be a finite non-negative number")
        if self.x_distribution != "gaussian":
            raise ParameterError(f"unsupported x_distribution {self.x_distribution!r}; only 'gaussian'")
        if self.format not in ("csv", "json"):
            raise ParameterError(f"format must be 'csv' or 'json', got {self.format!r}")
        if self.family not in ("le", "lemma"):
            raise ParameterError(f"family must be 'le' or 'lemma', got {self.family!r}")
        self.params()  # n, t, h and L checks

    def params(self) -> SchemeParams:
        L = load_hadamard(self.hadamard_path) if self.hadamard_path else None
        return SchemeParams(self.n, self.t, self.h, L)

    @classmethod
    def from_json(cls, path, **overrides) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list[dict]
    summary: dict

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TRIAL_FIELDS)
        for row in self.rows:
            writer.writerow([_fmt(row[k]) for k in TRIAL_FIELDS])
        return buf.getvalue()

    def to_json(self) -> str:
        cfg = asdict(self.config)
        cfg.pop("output_path", None)
        cfg.pop("n_jobs", None)
        doc = {"config": cfg, "summary": self.summary, "trials": self.rows}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def write(self, path=None) -> list[Path]:
        path = Path(path or self.config.output_path)
        written = [path]
        if self.config.format == "json":
            path.write_text(self.to_json(), encoding="utf-8", newline="\n")
        else:
            path.write_text(self.to_csv(), encoding="utf-8", newline="\n")
            side = path.with_name(path.name + ".summary.json")
            side.write_text(json.dumps(self.summary, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n")
            written.append(side)
        return written


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(v) if isinstance(v, float) else str(v)


def _draw_trial(params: SchemeParams, spec: GammaSpec, seed: int, x_norm: float):
    rng = np.random.default_rng(seed)
    w, x = draw_inputs(params.n, rng, x_norm)
    g = sample_gamma(spec, rng)
    return w, x, g


def trial_transcript(cfg: ExperimentConfig, trial: int) -> Transcript:
    """Replay one trial of ``cfg`` through the scalar protocol path."""
    params = cfg.params()
    rng = np.random.default_rng(cfg.seed + trial)
    w, x = draw_inputs(params.n, rng, cfg.x_norm)
    tr = run_session(params, w, x, rng, family=cfg.family)
    return Transcript(**{**tr.__dict__, "seed": cfg.seed + trial})


def _run_chunk(args) -> list[dict]:
    cfg, start, stop = args
    params = cfg.params()
    spec = GammaSpec.from_params(params, cfg.family)
    n = params.n
    w_bits, g_bits = [], []
    X = np.empty((stop - start, n), dtype=np.float64)
    for k, i in enumerate(range(start, stop)):
        w, x, g = _draw_trial(params, spec, cfg.seed + i, cfg.x_norm)
        w_bits.append(w.bits)
        g_bits.append(g.bits)
        X[k] = x
    W = bits_to_sign_rows(w_bits, n)
    G = bits_to_sign_rows(g_bits, n)
    norms = np.sqrt(np.einsum("ij,ij->i", X, X))
    batch = run_sessions(params, W, X, G, family=cfg.family)
    errors = batch.error.tolist()
    truths = batch.truth.tolist()
    estimates = batch.estimate.tolist()
    rows = []
    for k, i in enumerate(range(start, stop)):
        err = errors[k]
        truth = truths[k]
        bound = error_bound(params.h, n, float(norms[k]))
        rows.append(
            {
                "trial": i,
                "seed": cfg.seed + i,
                "estimate": estimates[k],
                "truth": truth,
                "abs_error": err,
                "bound": bound,
                "bound_satisfied": bool(err <= bound + BOUND_SLACK * (1.0 + abs(truth))),
            }
        )
    return rows


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    cfg.validate()
    params = cfg.params()
    chunks = [(cfg, s, min(s + CHUNK, cfg.trials)) for s in range(0, cfg.trials, CHUNK)]
    if cfg.n_jobs > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.n_jobs) as pool:
            parts = list(pool.map(_run_chunk, chunks))
    else:
        parts = [_run_chunk(c) for c in chunks]
    rows = sorted((r for part in parts for r in part), key=lambda r: r["trial"])

    spec = GammaSpec.from_params(params, cfg.family)
    gamma_count = count_gamma(GammaSpec(params.n, params.t, params.h, "lemma"))
    members = count_gamma_members(spec)
    eps = cfg.epsilon_for_bounds
    if eps is None:
        eps = error_bound(params.h, params.n, 1.0)
    errors = [r["abs_error"] for r in rows]
    summary = {
        "trials": cfg.trials,
        "violations": sum(not r["bound_satisfied"] for r in rows),
        "max_error": max(errors) if errors else 0.0,
        "mean_error": math.fsum(errors) / len(errors) if errors else 0.0,
        "error_bound": error_bound(params.h, params.n, cfg.x_norm),
        "gamma_count": gamma_count,
        "gamma_members": members,
        "mi_achieved": params.n - params.t - log2_int(gamma_count),
        "mi_achieved_members": params.n - params.t - log2_int(members),
        "mi_lower": mi_lower(params.n, params.t, eps).value,
        "publication_cost": params.publication_cost,
        "user_privacy": params.user_privacy,
    }
    result = ExperimentResult(config=cfg, rows=rows, summary=summary)
    if cfg.output_path:
        result.write()
    return result
