"""Configuration, seeded ensemble execution, and result persistence.

Every experiment is a pure function of (config, per-trial seeds); trials
are executed by a worker pool and merged by trial index, so outputs are
byte-identical regardless of the worker count.
"""

from __future__ import annotations

import hashlib
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import connectivity, experiments, spectral
from ._rng import trial_seed
from .sampler import PermutationSum, SamplerMethod, SwitchChain, sample_rrd
from .weights import (
    COMPLEX_GAUSSIAN,
    RADEMACHER,
    REAL_GAUSSIAN,
    WeightLaw,
    assemble_shifted,
    sample_weights,
    standardized_student_t,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = [
    "EXPERIMENTS",
    "ExperimentConfig",
    "ConfigError",
    "RunFailure",
    "RunRecord",
    "load_config",
    "run",
]

EXPERIMENTS = (
    "esd",
    "svdist",
    "logpot",
    "ssv_tail",
    "wegner",
    "broad",
    "discrepancy",
    "dist_subspace",
    "linstat",
    "i2m",
)

_FAILURE_BUDGET = 0.10


class ConfigError(ValueError):
    """Invalid configuration; maps to exit code 2."""


class RunFailure(RuntimeError):
    """More than the tolerated fraction of trials failed; exit code 1."""


@dataclass
class ExperimentConfig:
    experiment: str
    n: int
    p: float | None = None
    d: int | None = None
    z: complex = 0j
    weight_law: WeightLaw | None = None
    trials: int = 1
    seed: int = 0
    sampler: SamplerMethod = field(default_factory=SwitchChain)
    output_dir: str = "."
    workers: int = 1
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.n < 1:
            raise ConfigError("n must be positive")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.p is not None:
            if not (0.0 < self.p < 1.0):
                raise ConfigError("p must lie in (0, 1)")
            d = math.floor(self.p * self.n)
            if self.d is not None and self.d != d:
                raise ConfigError(f"d={self.d} inconsistent with floor(p*n)={d}")
            self.d = d
        if self.d is not None and not (1 <= self.d <= self.n - 1):
            raise ConfigError(f"need 1 <= d <= n-1, got d={self.d}")

    @property
    def effective_p(self) -> float:
        """p for the 1/sqrt(np) scaling; d/n when only d was given."""
        if self.p is not None:
            return self.p
        if self.d is not None:
            return self.d / self.n
        raise ConfigError("experiment requires p or d")

    def to_dict(self) -> dict:
        sampler = (
            {"method": "switch", "burn_in_steps": self.sampler.burn_in_steps}
            if isinstance(self.sampler, SwitchChain)
            else {"method": "perm", "max_rejections": self.sampler.max_rejections}
        )
        law = None
        if self.weight_law is not None:
            law = {"kind": self.weight_law.kind, "dof": self.weight_law.dof}
        return {
            "experiment": self.experiment,
            "n": self.n,
            "p": self.p,
            "d": self.d,
            "z": [self.z.real, self.z.imag],
            "weight_law": law,
            "trials": self.trials,
            "seed": self.seed,
            "sampler": sampler,
            "params": dict(sorted(self.params.items())),
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


_LAWS = {
    "real_gaussian": REAL_GAUSSIAN,
    "gaussian": REAL_GAUSSIAN,
    "complex_gaussian": COMPLEX_GAUSSIAN,
    "rademacher": RADEMACHER,
}


def _parse_law(name: str | None, dof: float | None) -> WeightLaw | None:
    if name is None or name == "none":
        return None
    if name in _LAWS:
        return _LAWS[name]
    if name == "student_t":
        if dof is None:
            raise ConfigError("student_t law requires student_dof")
        return standardized_student_t(dof)
    raise ConfigError(f"unknown weight law {name!r}")


_KNOWN_KEYS = {
    "experiment",
    "n",
    "p",
    "d",
    "z_re",
    "z_im",
    "weight_law",
    "student_dof",
    "trials",
    "seed",
    "sampler",
    "burn_in",
    "max_rejections",
    "out",
    "workers",
}


def load_config(path, overrides: dict | None = None) -> ExperimentConfig:
    """Load a flat TOML config file; CLI overrides win over file values."""
    try:
        with open(path, "rb") as f:
            raw = tomllib.load(f)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        experiment = raw["experiment"]
        n = int(raw["n"])
    except KeyError as exc:
        raise ConfigError(f"config missing required key {exc}") from exc

    sampler_name = raw.get("sampler", "switch")
    if sampler_name == "switch":
        sampler = SwitchChain(raw.get("burn_in"))
    elif sampler_name == "perm":
        sampler = PermutationSum(raw.get("max_rejections", 1000))
    else:
        raise ConfigError(f"unknown sampler {sampler_name!r}")

    params = {k: v for k, v in raw.items() if k not in _KNOWN_KEYS}
    return ExperimentConfig(
        experiment=experiment,
        n=n,
        p=raw.get("p"),
        d=raw.get("d"),
        z=complex(raw.get("z_re", 0.0), raw.get("z_im", 0.0)),
        weight_law=_parse_law(raw.get("weight_law"), raw.get("student_dof")),
        trials=int(raw.get("trials", 1)),
        seed=int(raw.get("seed", 0)),
        sampler=sampler,
        output_dir=raw.get("out", "."),
        workers=int(raw.get("workers", 1)),
        params=params,
    )


@dataclass
class RunRecord:
    config: dict
    config_hash: str
    trial_seeds: list[int]
    manifest: list[str]
    elapsed_seconds: float
    failed_trials: list[int]
    summary: dict

    def to_json(self) -> str:
        return json.dumps(
            {
                "config": self.config,
                "config_hash": self.config_hash,
                "trial_seeds": self.trial_seeds,
                "manifest": self.manifest,
                "elapsed_seconds": self.elapsed_seconds,
                "failed_trials": self.failed_trials,
                "summary": self.summary,
            },
            sort_keys=True,
        )


def _write_csv(path: Path, config_hash: str, header: str, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"# config={config_hash}\n")
        f.write(header + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _map_trials(fn, args_list, workers: int):
    """Run one-argument fn over args_list, preserving order.  Failures are
    collected, not raised; returns (results, failed_indices)."""
    results = [None] * len(args_list)
    failed = []
    if workers <= 1:
        for i, a in enumerate(args_list):
            try:
                results[i] = fn(a)
            except Exception as exc:  # noqa: BLE001 - recorded, not silent
                failed.append((i, repr(exc)))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futs = [pool.submit(fn, a) for a in args_list]
            for i, fut in enumerate(futs):
                try:
                    results[i] = fut.result()
                except Exception as exc:  # noqa: BLE001
                    failed.append((i, repr(exc)))
    return results, failed


# ---------------------------------------------------------------------------
# per-trial worker functions (module level so they pickle for process pools)


def _esd_trial(args):
    n, d, p, law, sampler, seed = args
    A = sample_rrd(n, d, sampler, seed)
    if law is None:
        return spectral.eigenvalues(A.adjacency.astype(float))
    X = sample_weights(n, law, trial_seed(seed, 1))
    M = assemble_shifted(A, X, p, 0.0)
    return spectral.eigenvalues(M.entries)


def _svdist_trial(args):
    n, d, p, z, law, sampler, seed = args
    A = sample_rrd(n, d, sampler, seed)
    X = sample_weights(n, law, trial_seed(seed, 1))
    M = assemble_shifted(A, X, p, z)
    return spectral.singular_values(M.entries)


def _ssv_trial(args):
    n, p, z, law, sampler, seed = args
    return experiments.ssv_tail_trial(n, p, z, law, sampler, seed)


def _wegner_trial(args):
    n, p, z, law, sampler, alpha, a1, seed = args
    return experiments.wegner_trial(n, p, z, law, sampler, alpha, a1, seed)


def _broad_trial(args):
    n, d, h_cut, delta, nu, sampler, subset_trials, seed = args
    A = sample_rrd(n, d, sampler, seed)
    params = connectivity.BroadConnectivityParams(h_cut, delta, nu)
    mode = connectivity.Randomized(subset_trials, trial_seed(seed, 1))
    return connectivity.verify_broad(A.adjacency, params, mode)


def _discrepancy_trial(args):
    n, d, p, eps0, search_trials, sampler, seed = args
    A = sample_rrd(n, d, sampler, seed)
    return connectivity.discrepancy_search(
        A.adjacency, p, eps0, search_trials, trial_seed(seed, 1)
    )


def _i2m_trial(args):
    max_m, max_n, seed = args
    from ._rng import generator

    rng = generator(seed)
    m = int(rng.integers(2, max_m + 1))
    nn = int(rng.integers(m, max_n + 1))
    M = rng.standard_normal((m, nn)) + 1j * rng.standard_normal((m, nn))
    res = experiments.row_distances(M)
    if res.i2m_lhs is None:
        return (m, nn, float("nan"))
    rel = abs(res.i2m_lhs - res.i2m_rhs) / res.i2m_lhs
    return (m, nn, rel)


# ---------------------------------------------------------------------------


def run(config: ExperimentConfig) -> RunRecord:
    """Execute the configured experiment and persist CSV + JSON outputs."""
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    chash = config.digest()
    seeds = [trial_seed(config.seed, t) for t in range(config.trials)]
    t0 = time.perf_counter()
    manifest: list[str] = []
    summary: dict = {}
    failed: list = []

    n, p, z, law = config.n, None, config.z, config.weight_law
    if config.experiment not in ("dist_subspace", "i2m", "linstat"):
        p = config.effective_p
    d = config.d

    if config.experiment == "esd":
        args = [(n, d, p, law, config.sampler, s) for s in seeds]
        res, failed = _map_trials(_esd_trial, args, config.workers)
        eigs = np.concatenate([r for r in res if r is not None])
        if law is None:
            ref = spectral.oriented_km(d) if d >= 3 else None
        else:
            ref = spectral.CIRCULAR
        measure = spectral.EmpiricalMeasure(eigs)
        _write_csv(
            out / "eigenvalues.csv",
            chash,
            "re,im",
            ((v.real, v.imag) for v in eigs),
        )
        manifest.append("eigenvalues.csv")
        bins = int(config.params.get("bins", 60))
        hist = spectral.radial_histogram(measure, bins)
        _write_csv(out / "radial_hist.csv", chash, "r_mid,density", hist)
        manifest.append("radial_hist.csv")
        if ref is not None:
            grid = np.linspace(0.0, ref.support_radius, 201)
            dens = spectral.reference_radial_density(ref, grid)
            _write_csv(
                out / "reference.csv", chash, "r,density", zip(grid, dens)
            )
            manifest.append("reference.csv")
            summary["radial_ks"] = spectral.radial_ks(measure, ref)
            summary["reference_radius"] = ref.support_radius
            summary["reference_kind"] = ref.kind

    elif config.experiment == "svdist":
        args = [(n, d, p, z, law, config.sampler, s) for s in seeds]
        res, failed = _map_trials(_svdist_trial, args, config.workers)
        svals = np.concatenate([r for r in res if r is not None])
        _write_csv(out / "singular_values.csv", chash, "s", ((v,) for v in svals))
        manifest.append("singular_values.csv")

    elif config.experiment == "logpot":
        args = [(n, d, p, z, law, config.sampler, s) for s in seeds]
        res, failed = _map_trials(_svdist_trial, args, config.workers)
        vals = [
            spectral.empirical_log_potential(r) for r in res if r is not None
        ]
        _write_csv(
            out / "log_potential.csv",
            chash,
            "trial,logpot",
            ((i, v) for i, v in enumerate(vals)),
        )
        manifest.append("log_potential.csv")
        finite = [v for v in vals if math.isfinite(v)]
        mean = float(np.mean(finite)) if finite else float("nan")
        u = spectral.reference_potential(z)
        summary.update(
            {"mean_logpot": mean, "reference_potential": u, "abs_error": abs(mean - u)}
        )

    elif config.experiment == "ssv_tail":
        args = [(n, p, z, law, config.sampler, s) for s in seeds]
        res, failed = _map_trials(_ssv_trial, args, config.workers)
        smallest = np.array([r for r in res if r is not None])
        t_max = float(config.params.get("t_max", 1.0))
        t_points = int(config.params.get("t_points", 21))
        grid = np.linspace(0.0, t_max, t_points)
        curve = experiments.ssv_tail_curve(
            smallest, grid, n, config.trials, config.seed
        )
        _write_csv(
            out / "ssv_tail.csv", chash, "t,prob", zip(curve.grid, curve.probs)
        )
        manifest.append("ssv_tail.csv")
        envelope = curve.grid + 1.0 / math.sqrt(n)
        summary["fitted_C"] = float(np.max(curve.probs / envelope))

    elif config.experiment == "wegner":
        alpha = float(config.params.get("alpha", 0.5))
        a1 = float(config.params.get("a1", 0.1))
        args = [(n, p, z, law, config.sampler, alpha, a1, s) for s in seeds]
        res, failed = _map_trials(_wegner_trial, args, config.workers)
        prof = experiments.wegner_profile(
            [r for r in res if r is not None], n, alpha, a1
        )
        _write_csv(
            out / "wegner.csv", chash, "i,ratio", zip(prof.indices, prof.ratios)
        )
        manifest.append("wegner.csv")
        summary["min_ratio"] = float(prof.ratios.min())

    elif config.experiment == "broad":
        h_cut = float(config.params.get("h_cut", 1.0))
        delta = float(config.params.get("delta", p / 2.0))
        nu = float(config.params.get("nu", p / 8.0))
        subset_trials = int(config.params.get("subset_trials", 200))
        args = [
            (n, d, h_cut, delta, nu, config.sampler, subset_trials, s)
            for s in seeds
        ]
        res, failed = _map_trials(_broad_trial, args, config.workers)
        verdicts = [r for r in res if r is not None]
        _write_csv(
            out / "broad.csv",
            chash,
            "trial,verdict",
            ((i, v.kind) for i, v in enumerate(verdicts)),
        )
        manifest.append("broad.csv")
        (out / "broad_verdicts.json").write_text(
            "[" + ",".join(v.to_json() for v in verdicts) + "]", encoding="utf-8"
        )
        manifest.append("broad_verdicts.json")
        ok = sum(v.kind == "not_falsified" for v in verdicts)
        summary["fraction_not_falsified"] = ok / max(len(verdicts), 1)

    elif config.experiment == "discrepancy":
        eps0 = float(config.params.get("eps0", 0.2))
        search_trials = int(config.params.get("search_trials", 1000))
        args = [
            (n, d, p, eps0, search_trials, config.sampler, s) for s in seeds
        ]
        res, failed = _map_trials(_discrepancy_trial, args, config.workers)
        verdicts = [r for r in res if r is not None]
        _write_csv(
            out / "discrepancy.csv",
            chash,
            "trial,verdict",
            ((i, v.kind) for i, v in enumerate(verdicts)),
        )
        manifest.append("discrepancy.csv")
        summary["fraction_not_falsified"] = sum(
            v.kind == "not_falsified" for v in verdicts
        ) / max(len(verdicts), 1)

    elif config.experiment == "dist_subspace":
        k = int(config.params.get("k", n // 10))
        stats = experiments.dist_subspace_experiment(
            n, k, config.trials, config.seed
        )
        _write_csv(
            out / "dist_subspace.csv",
            chash,
            "k,mean_sq,var",
            [(k, stats["mean_sq"], stats["var"])],
        )
        manifest.append("dist_subspace.csv")
        summary.update(stats | {"k": k})

    elif config.experiment == "linstat":
        ns = [int(v) for v in config.params.get("ns", [n // 4, n // 2, n])]
        f = experiments.PiecewiseLinear(
            tuple(config.params.get("f_knots", (-2.0, 0.0, 2.0))),
            tuple(config.params.get("f_values", (0.0, 1.0, 0.0))),
        )
        variances = experiments.linstat_concentration(
            ns, config.effective_p, z, law, f, config.trials, config.seed
        )
        _write_csv(
            out / "linstat.csv", chash, "n,variance", sorted(variances.items())
        )
        manifest.append("linstat.csv")
        summary["variance_by_n"] = {str(k): v for k, v in variances.items()}

    elif config.experiment == "i2m":
        max_m = int(config.params.get("max_m", 200))
        max_n = int(config.params.get("max_n", 400))
        args = [(max_m, max_n, s) for s in seeds]
        res, failed = _map_trials(_i2m_trial, args, config.workers)
        rows = [r for r in res if r is not None]
        _write_csv(
            out / "i2m.csv",
            chash,
            "m,n,rel_error",
            rows,
        )
        manifest.append("i2m.csv")
        summary["max_rel_error"] = float(
            np.nanmax([r[2] for r in rows]) if rows else float("nan")
        )

    elapsed = time.perf_counter() - t0
    record = RunRecord(
        config=config.to_dict(),
        config_hash=chash,
        trial_seeds=seeds,
        manifest=manifest,
        elapsed_seconds=round(elapsed, 3),
        failed_trials=[list(f) for f in failed],
        summary=summary,
    )
    meta = {
        "config": record.config,
        "config_hash": chash,
        "failed_trials": record.failed_trials,
        "summary": summary,
    }
    (out / "metadata.json").write_text(
        json.dumps(meta, sort_keys=True), encoding="utf-8"
    )
    (out / "run_record.json").write_text(record.to_json(), encoding="utf-8")
    if len(failed) > _FAILURE_BUDGET * config.trials:
        raise RunFailure(
            f"{len(failed)}/{config.trials} trials failed: {failed[:3]}"
        )
    return record
