"""Seeded Monte Carlo experiments behind the ``rmt`` command line.

Each experiment expands its configuration into independent tasks, one per
(grid point, replica), each with its own random stream
``make_rng(master_seed, stream_index(n, replica))``.  Tasks may run in worker
processes; records are sorted before aggregation, so the output never depends
on scheduling.
"""
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .coefficients import lanczos_coefficients
from .distributions import beta_variates
from .ensembles import (
    EnsembleSpec,
    ScalingRegime,
    coupled_limit_entries,
    jacobi_entries,
    rescale_matrix,
    sample_batch,
    sample_jacobi_canonical,
    sample_tridiag,
)
from .errors import NumericalError, ParameterError, SupportError
from .measures import DiscreteMeasure, MarchenkoPastur, Semicircle, kolmogorov_distance
from .rates import beta_concentration_bound, rate_ig, rate_il_from_coefficients
from .rng import make_rng, stream_index
from .spectral import decompose, empirical_measure, moment_e1

EXPERIMENTS = ("sample", "limit", "rate", "concentration", "findim", "empspectral")
SUMMARY_STATS = ("median", "mean", "q10", "q90")
MIN_FINDIM_SAMPLES = 100
MAX_FINDIM_DIM = 5


@dataclass
class ExperimentConfig:
    experiment: str
    ensemble: str = "jacobi"
    beta: float = 2.0
    # a_n = sum(a[i] * n**i), likewise b_n
    a: list = field(default_factory=lambda: [0.0, 2.0])
    b: list = field(default_factory=lambda: [0.0, 0.0, 1.0])
    regime: Optional[str] = None
    sigma: Optional[float] = None
    tau: Optional[float] = None
    n_grid: list = field(default_factory=lambda: [64, 128, 256])
    replicas: int = 20
    master_seed: int = 0
    output_path: Optional[str] = None
    output_format: str = "csv"
    depth: int = 10
    weighting: str = "spectral"
    N_grid: list = field(default_factory=lambda: [1e3, 1e4, 1e5, 1e6])
    samples: int = 10000
    target: str = "laguerre"
    cells: list = field(default_factory=list)
    workers: int = 1
    record_timings: bool = False
    matrix_dir: Optional[str] = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ParameterError(f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENTS}")
        if not (
            isinstance(self.n_grid, (list, tuple))
            and self.n_grid
            and all(isinstance(n, (int, float)) and n == int(n) and n >= 1 for n in self.n_grid)
        ):
            raise ParameterError("n_grid must be a nonempty list of positive integers")
        self.n_grid = [int(n) for n in self.n_grid]
        if self.n_grid != sorted(set(self.n_grid)):
            raise ParameterError("n_grid must be strictly ascending")
        if int(self.replicas) != self.replicas or self.replicas < 1:
            raise ParameterError("replicas must be a positive integer")
        if not (0 <= int(self.master_seed) < 1 << 64):
            raise ParameterError("master_seed must be an unsigned 64-bit integer")
        if self.output_format not in ("csv", "json"):
            raise ParameterError("output_format must be 'csv' or 'json'")
        if not self.a or not self.b:
            raise ParameterError("a and b must be nonempty coefficient lists")
        if self.workers < 1:
            raise ParameterError("workers must be at least 1")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ParameterError(f"unknown config field(s): {', '.join(unknown)}")
        if "experiment" not in data:
            raise ParameterError("config needs an 'experiment' field")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


def default_config(experiment: str, **overrides) -> ExperimentConfig:
    """Configuration reproducing the reference run of each experiment."""
    base = {
        "sample": dict(regime=None),
        "limit": dict(regime="LLN1", tau=0.5, a=[0, 2], b=[0, 0, 1]),
        "rate": dict(regime="LDP1", tau=0.5, a=[0, 2], b=[0, 0, 1], n_grid=[64, 128, 256]),
        "concentration": dict(
            replicas=10**6,
            n_grid=[1],
            cells=[[a, b, e] for a, b in ((1e3, 1e3), (1e4, 1e3), (1e5, 1e5)) for e in (0.05, 0.1, 0.2)],
        ),
        "findim": dict(n_grid=[3], a=[5], b=[0, 1], target="laguerre", replicas=5),
        "empspectral": dict(a=[0, 2], b=[0, 2], n_grid=[64, 256, 1024]),
    }
    if experiment not in base:
        raise ParameterError(f"unknown experiment {experiment!r}; expected one of {EXPERIMENTS}")
    params = dict(base[experiment])
    params.update(overrides)
    return ExperimentConfig(experiment=experiment, **params)


def poly(coeffs, n: float) -> float:
    return float(sum(c * n ** i for i, c in enumerate(coeffs)))


def _spec(cfg: ExperimentConfig, n: int) -> EnsembleSpec:
    kind = cfg.ensemble
    a = poly(cfg.a, n) if kind in ("jacobi", "laguerre") else None
    b = poly(cfg.b, n) if kind == "jacobi" else None
    try:
        return EnsembleSpec(kind, cfg.beta, n, a, b)
    except ParameterError as exc:
        raise ParameterError(f"at n={n}: {exc}") from None


def _regime(cfg: ExperimentConfig, spec: EnsembleSpec) -> Optional[ScalingRegime]:
    if cfg.regime is None:
        return None
    return ScalingRegime(cfg.regime, spec, sigma=cfg.sigma, tau=cfg.tau)


def _reference_law(cfg: ExperimentConfig):
    if cfg.regime in ("LLN2", "LDP2"):
        return Semicircle()
    if cfg.regime in ("LLN1", "LDP1"):
        return MarchenkoPastur(cfg.tau)
    raise ParameterError(f"regime {cfg.regime!r} has no reference law")


def check_hypotheses(cfg: ExperimentConfig) -> list:
    """Finite-n proxies of the limit theorems' parameter hypotheses, evaluated at max n."""
    n = max(cfg.n_grid)
    a, b, bp = poly(cfg.a, n), poly(cfg.b, n), cfg.beta / 2
    notes = []
    if cfg.regime == "LLN2":
        gap = math.sqrt(b / n) * abs(cfg.sigma - a / b)
        if gap > 0.1:
            notes.append(f"sqrt(b_n/n)*|sigma - a_n/b_n| = {gap:.3g} at n={n} is not small")
        if a / n < 10:
            notes.append(f"a_n/n = {a / n:.3g} at n={n} is not large")
    elif cfg.regime in ("LLN1", "LDP1"):
        ratio = bp * n / a
        if abs(ratio - cfg.tau) > 0.05 * cfg.tau:
            notes.append(f"beta' n / a_n = {ratio:.3g} at n={n} differs from tau={cfg.tau}")
        if b / n < 10:
            notes.append(f"b_n/n = {b / n:.3g} at n={n} is not large")
    elif cfg.regime == "LDP2":
        gap = abs(a - b) / math.sqrt(b * n)
        if gap > 0.1:
            notes.append(f"|a_n - b_n|/sqrt(b_n n) = {gap:.3g} at n={n} is not small")
        if min(a, b) / n < 10:
            notes.append(f"a_n/n, b_n/n at n={n} are not large")
    for note in notes:
        warnings.warn(f"{cfg.experiment}: {note}", stacklevel=2)
    return notes


# -- per-task workers (module level so they pickle) ---------------------------


def _base(cfg, n, replica, stream):
    return {"experiment": cfg.experiment, "summary": 0, "stat": "", "n": n, "replica": replica, "stream": stream}


def _sample_task(cfg, n, replica):
    stream = stream_index(n, replica)
    spec = _spec(cfg, n)
    T = sample_tridiag(spec, make_rng(cfg.master_seed, stream))
    regime = _regime(cfg, spec)
    if regime is not None:
        T = rescale_matrix(T, regime)
    if cfg.matrix_dir:
        path = Path(cfg.matrix_dir) / f"{cfg.experiment}_n{n}_r{replica}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(T.to_json())
    dec = decompose(T)
    rec = _base(cfg, n, replica, stream)
    rec.update(
        lambda_min=float(dec.eigenvalues[0]),
        lambda_max=float(dec.eigenvalues[-1]),
        trace=float(T.diag.sum()),
        m1=moment_e1(T, 1),
        m2=moment_e1(T, 2),
        m3=moment_e1(T, 3),
        m4=moment_e1(T, 4),
    )
    return rec


def _limit_task(cfg, n, replica):
    stream = stream_index(n, replica)
    spec = _spec(cfg, n)
    T = rescale_matrix(sample_tridiag(spec, make_rng(cfg.master_seed, stream)), _regime(cfg, spec))
    dec = decompose(T)
    law = _reference_law(cfg)
    mu = DiscreteMeasure(dec.eigenvalues, dec.first_components_sq)
    rec = _base(cfg, n, replica, stream)
    rec.update(
        dk=kolmogorov_distance(mu, law),
        dk_empirical=kolmogorov_distance(empirical_measure(T), law),
        m1=moment_e1(T, 1),
        m2=moment_e1(T, 2),
    )
    return rec


def _empspectral_task(cfg, n, replica):
    stream = stream_index(n, replica)
    spec = _spec(cfg, n)
    rng = make_rng(cfg.master_seed, stream)
    T = sample_tridiag(spec, rng)
    uniform = empirical_measure(T, "uniform")
    if cfg.weighting == "spectral":
        dec = decompose(T)
        other = DiscreteMeasure(dec.eigenvalues, dec.first_components_sq)
    elif cfg.weighting == "dirichlet":
        other = empirical_measure(T, "dirichlet", rng=rng, concentration=spec.bp)
    else:
        raise ParameterError(f"weighting must be 'spectral' or 'dirichlet', got {cfg.weighting!r}")
    rec = _base(cfg, n, replica, stream)
    rec["dk"] = kolmogorov_distance(uniform, other)
    return rec


def _rate_task(cfg, n, replica):
    stream = stream_index(n, replica)
    spec = _spec(cfg, n)
    regime = _regime(cfg, spec)
    T = rescale_matrix(sample_tridiag(spec, make_rng(cfg.master_seed, stream)), regime)
    dec = decompose(T)
    mu = DiscreteMeasure(dec.eigenvalues, dec.first_components_sq)
    depth = min(cfg.depth, len(mu))
    rec = _base(cfg, n, replica, stream)
    status = "ok"
    try:
        rc = lanczos_coefficients(mu, depth)
    except NumericalError as exc:
        rc, status = None, f"numerical: {exc}"
    if cfg.regime == "LDP2":
        rate = rate_ig(rc) if rc is not None else math.inf
        speed = spec.bp * n
    else:
        rate = rate_il_from_coefficients(rc, cfg.tau) if rc is not None else math.inf
        if rc is not None and math.isinf(rate):
            status = "support: not supported on [0, inf)"
        speed = spec.a
    rec.update(depth=depth, rate=rate, speed=speed, status=status)
    return rec


def _findim_spec(cfg, n, big_n):
    return EnsembleSpec("jacobi", cfg.beta, n, poly(cfg.a, big_n), poly(cfg.b, big_n))


def _rescaled_traces(cfg, spec, p):
    kind = "FINDIM_G" if cfg.target == "gaussian" else "FINDIM_L"
    scale, shift = ScalingRegime(kind, spec, sigma=cfg.sigma).affine_params()
    diag, _ = jacobi_entries(p)
    return scale * (diag.sum(axis=1) - spec.n * shift)


def _target_traces(cfg, n, rng):
    if cfg.target == "gaussian":
        spec = EnsembleSpec("gaussian", cfg.beta, n)
    else:
        spec = EnsembleSpec("laguerre", cfg.beta, n, poly(cfg.a, 0.0))
    diag, _ = sample_batch(spec, rng, cfg.samples)
    return diag.sum(axis=1)


def _ks(x, y) -> float:
    return kolmogorov_distance(DiscreteMeasure.from_samples(x), DiscreteMeasure.from_samples(y))


def _findim_task(cfg, n, big_n, replica):
    """Two-sample KS distance between rescaled Jacobi traces and limit-ensemble traces.

    ``ks`` compares against an independent limit sample.  ``ks_coupled`` compares
    against the limit sample built from the same canonical moments
    (``coupled_limit_entries``); it has no sampling floor and tends to 0 with N.
    Streams do not depend on N, so all N share common random numbers.
    """
    stream = stream_index(n, 2 * replica)
    spec = _findim_spec(cfg, n, big_n)
    p = sample_jacobi_canonical(spec, make_rng(cfg.master_seed, stream), cfg.samples)
    jac = _rescaled_traces(cfg, spec, p)
    ref = _target_traces(cfg, n, make_rng(cfg.master_seed, stream_index(n, 2 * replica + 1)))
    coupled, _ = coupled_limit_entries(spec, p, cfg.target, a_limit=poly(cfg.a, 0.0))
    rec = _base(cfg, n, replica, stream)
    rec["N"] = big_n
    rec["ks"] = _ks(jac, ref)
    rec["ks_coupled"] = _ks(jac, coupled.sum(axis=1))
    return rec


def _concentration_task(cfg, index, cell):
    a, b, eps = (float(v) for v in cell)
    bound = beta_concentration_bound(a, b, eps)
    rng = make_rng(cfg.master_seed, index)
    draws = cfg.replicas
    x = beta_variates(a, b, rng, size=draws)
    exceed = int(np.count_nonzero(np.abs(x - a / (a + b)) > eps))
    freq = exceed / draws
    stderr = math.sqrt(freq * (1 - freq) / draws)
    return {
        "experiment": cfg.experiment,
        "summary": 0,
        "stat": "",
        # draws within a cell are the replicas; the cell index stands in for (n, replica)
        "n": None,
        "replica": None,
        "cell": index,
        "stream": index,
        "a": a,
        "b": b,
        "eps": eps,
        "draws": draws,
        "exceedances": exceed,
        "empirical": freq,
        "stderr": stderr,
        "bound": bound,
        "holds": int(freq <= bound),
        "margin_ok": int(bound >= 1 or bound > freq + 5 * stderr),
    }


TASKS = {
    "sample": _sample_task,
    "limit": _limit_task,
    "empspectral": _empspectral_task,
    "rate": _rate_task,
    "findim": _findim_task,
    "concentration": _concentration_task,
}


def _run_task(cfg, *key):
    start = time.perf_counter()
    record = TASKS[cfg.experiment](cfg, *key)
    record["wall_time"] = round(time.perf_counter() - start, 6) if cfg.record_timings else None
    return record


METRICS = {
    "sample": ("lambda_min", "lambda_max", "trace", "m1", "m2", "m3", "m4"),
    "limit": ("dk", "dk_empirical", "m1", "m2"),
    "empspectral": ("dk",),
    "rate": ("rate",),
    "findim": ("ks", "ks_coupled"),
    "concentration": (),
}


@dataclass
class ExperimentResult:
    experiment: str
    records: list
    summary: list
    notes: list = field(default_factory=list)

    def rows(self) -> list:
        return self.records + self.summary

    def column(self, name, **where) -> np.ndarray:
        rows = [r for r in self.records if all(r.get(k) == v for k, v in where.items())]
        return np.array([r[name] for r in rows], dtype=float)

    def stat(self, metric: str, stat: str = "median", **where) -> float:
        for r in self.summary:
            if r["stat"] == stat and all(r.get(k) == v for k, v in where.items()):
                return r[metric]
        raise KeyError((metric, stat, where))


def _task_keys(cfg: ExperimentConfig) -> list:
    if cfg.experiment == "concentration":
        if not cfg.cells:
            raise ParameterError("concentration needs a nonempty list of [a, b, eps] cells")
        for cell in cfg.cells:
            if len(cell) != 3:
                raise ParameterError(f"cell {cell!r} is not [a, b, eps]")
            beta_concentration_bound(*(float(v) for v in cell))
        return [(i, tuple(cell)) for i, cell in enumerate(cfg.cells)]
    if cfg.experiment == "findim":
        if cfg.samples < MIN_FINDIM_SAMPLES:
            raise ParameterError(f"findim needs at least {MIN_FINDIM_SAMPLES} samples per side, got {cfg.samples}")
        if max(cfg.n_grid) > MAX_FINDIM_DIM:
            raise ParameterError(f"findim works at fixed small dimension n <= {MAX_FINDIM_DIM}")
        if cfg.target not in ("gaussian", "laguerre"):
            raise ParameterError("findim target must be 'gaussian' or 'laguerre'")
        if cfg.target == "gaussian" and not (cfg.sigma and cfg.sigma > 0):
            raise ParameterError("findim with the gaussian target needs sigma > 0")
        grid = [float(v) for v in cfg.N_grid]
        if not grid or grid != sorted(set(grid)):
            raise ParameterError("N_grid must be nonempty and strictly ascending")
        for n in cfg.n_grid:
            for big_n in grid:
                _findim_spec(cfg, n, big_n)
        return [(n, big_n, r) for n in cfg.n_grid for big_n in grid for r in range(cfg.replicas)]
    if cfg.experiment in ("limit", "rate"):
        if cfg.ensemble != "jacobi":
            raise ParameterError(f"{cfg.experiment} experiments use the jacobi ensemble")
        allowed = ("LLN2", "LLN1") if cfg.experiment == "limit" else ("LDP2", "LDP1")
        if cfg.regime not in allowed:
            raise ParameterError(f"{cfg.experiment} needs regime in {allowed}, got {cfg.regime!r}")
    if cfg.experiment == "sample" and cfg.regime is not None and cfg.ensemble != "jacobi":
        raise ParameterError("rescaling regimes apply to the jacobi ensemble only")
    for n in cfg.n_grid:
        _regime(cfg, _spec(cfg, n))
    if cfg.experiment == "limit":
        _reference_law(cfg)
    return [(n, r) for n in cfg.n_grid for r in range(cfg.replicas)]


def _sort_key(rec):
    return tuple(rec.get(k) or 0 for k in ("n", "N", "cell", "replica"))


def _summarise(cfg: ExperimentConfig, records: list) -> list:
    metrics = METRICS[cfg.experiment]
    if not metrics:
        return []
    group_keys = ("n", "N") if cfg.experiment == "findim" else ("n",)
    groups = {}
    for rec in records:
        groups.setdefault(tuple(rec[k] for k in group_keys), []).append(rec)
    out = []
    for key in sorted(groups):
        rows = groups[key]
        for stat in SUMMARY_STATS:
            row = {"experiment": cfg.experiment, "summary": 1, "stat": stat}
            row.update(zip(group_keys, key))
            row.update(replica=None, stream=None)
            for m in metrics:
                vals = np.array([r[m] for r in rows], dtype=float)
                if stat == "median":
                    v = np.median(vals)
                elif stat == "mean":
                    v = np.mean(vals)
                else:
                    v = np.quantile(vals, 0.1 if stat == "q10" else 0.9)
                row[m] = float(v)
            row["count"] = len(rows)
            out.append(row)
    return out


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    keys = _task_keys(cfg)
    notes = check_hypotheses(cfg) if cfg.experiment in ("limit", "rate") else []
    if cfg.workers > 1 and len(keys) > 1:
        chunk = max(1, len(keys) // (4 * cfg.workers))
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(_run_task, *zip(*[(cfg,) + k for k in keys]), chunksize=chunk))
    else:
        records = [_run_task(cfg, *k) for k in keys]
    records.sort(key=_sort_key)
    return ExperimentResult(cfg.experiment, records, _summarise(cfg, records), notes)


def run_limit_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    return run_experiment(_expect(cfg, "limit"))


def run_empspectral_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    return run_experiment(_expect(cfg, "empspectral"))


def run_findim_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    return run_experiment(_expect(cfg, "findim"))


def run_concentration_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    return run_experiment(_expect(cfg, "concentration"))


def run_rate_report(cfg: ExperimentConfig) -> ExperimentResult:
    return run_experiment(_expect(cfg, "rate"))


def run_sample_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    return run_experiment(_expect(cfg, "sample"))


def _expect(cfg, name):
    if cfg.experiment != name:
        raise ParameterError(f"config is for experiment {cfg.experiment!r}, not {name!r}")
    return cfg
