"""Experiment runners producing the convergence, rate-vs-M and complexity tables."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from ..algorithms import AlgOptions, AlgorithmResult, baseline, flops_ear, flops_fp, max_snr_ear, max_snr_fp
from ..channel import ScenarioConfig, build_channels
from ..errors import ConfigError
from ..irs_model import IrsLayout, ReflectionState, irs_transmit_power_vector, snr

KINDS = ("convergence", "rate_vs_m", "complexity_vs_m", "single_run")
ALGORITHMS = ("fp", "ear", "active", "passive", "random", "none")
HYBRID = {"fp", "ear"}
DEFAULT_SWEEP = (16, 32, 64, 128, 192, 256)
DEFAULT_POWERS = (20.0, 25.0)

# sweep point conventions
RATE_VS_M_ACTIVE_FRACTION = 0.5


@dataclass
class ExperimentSpec:
    kind: str
    scenario: ScenarioConfig
    sweep: Sequence[int] = DEFAULT_SWEEP
    powers: Sequence[float] = DEFAULT_POWERS
    algorithms: Sequence[str] = ALGORITHMS
    seed: int = 0
    output_dir: Path = Path("out")
    epsilon: float = 1e-4
    max_outer: int = 100
    active_fraction: Optional[float] = None
    fixed_iterations: Optional[int] = None
    workers: int = 1
    trace: bool = False
    svg: bool = False
    backend: Optional[str] = None
    scenario_path: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}; expected one of {KINDS}")
        self.algorithms = tuple(self.algorithms)
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad:
            raise ConfigError(f"unknown algorithm(s) {bad}; expected a subset of {ALGORITHMS}")
        if not self.algorithms:
            raise ConfigError("no algorithms selected")
        self.sweep = tuple(int(m) for m in self.sweep)
        self.powers = tuple(float(p) for p in self.powers)
        self.output_dir = Path(self.output_dir)
        if self.kind in ("rate_vs_m", "complexity_vs_m"):
            if not self.sweep:
                raise ConfigError("sweep must not be empty")
            hybrid = self.kind == "complexity_vs_m" or HYBRID.intersection(self.algorithms)
            if hybrid and any(m < 4 or m % 2 for m in self.sweep):
                raise ConfigError("sweep values must be even and >= 4 for hybrid layouts")
        if self.kind == "convergence" and not self.powers:
            raise ConfigError("powers must not be empty")
        if self.active_fraction is not None and not 0 < self.active_fraction <= 0.5:
            raise ConfigError("active fraction must lie in (0, 0.5]")
        if self.fixed_iterations is not None and self.fixed_iterations < 1:
            raise ConfigError("fixed iteration count must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def options(self, trace=None) -> AlgOptions:
        return AlgOptions(epsilon=self.epsilon, max_outer=self.max_outer, seed=self.seed,
                          backend=self.backend, trace=trace)


def layout_for(algorithm: str, M: int, M_a: int, beta_max: float) -> IrsLayout:
    if algorithm in HYBRID:
        return IrsLayout.hybrid(M, M_a, beta_max)
    if algorithm == "active":
        return IrsLayout.fully_active(M, beta_max)
    if algorithm in ("passive", "random"):
        return IrsLayout.passive(M, beta_max)
    return IrsLayout.fully_active(M, beta_max)  # no IRS: zero amplitudes


def run_algorithm(algorithm: str, cfg: ScenarioConfig, layout: IrsLayout, opts: AlgOptions) -> AlgorithmResult:
    ch = build_channels(cfg, layout)
    if algorithm == "fp":
        return max_snr_fp(cfg, ch, layout, opts)
    if algorithm == "ear":
        return max_snr_ear(cfg, ch, layout, opts)
    kind = {"active": "active_irs", "passive": "passive_irs", "random": "random_phase", "none": "no_irs"}[algorithm]
    return baseline(kind, cfg, ch, layout, opts)


@dataclass
class PointResult:
    key: tuple
    algorithm: str
    cfg: ScenarioConfig
    result: AlgorithmResult
    trace: list = field(default_factory=list)


def _run_point(args) -> PointResult:
    key, algorithm, cfg, M_a, spec = args
    trace = [] if spec.trace else None
    layout = layout_for(algorithm, cfg.M, M_a, cfg.beta_max)
    res = run_algorithm(algorithm, cfg, layout, spec.options(trace))
    return PointResult(key, algorithm, cfg, res, trace or [])


def _dispatch(tasks, workers) -> list[PointResult]:
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_point, tasks))
    else:
        results = [_run_point(t) for t in tasks]
    return sorted(results, key=lambda r: r.key)


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(path: Path, header: Sequence[str], rows, spec: ExperimentSpec) -> Path:
    buf = io.StringIO()
    buf.write(f"# kind={spec.kind} scenario_sha256={spec.scenario.digest()} seed={spec.seed}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(x) for x in row])
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(buf.getvalue())
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def read_csv(path) -> tuple[dict, list[dict]]:
    """Parse a harness CSV into (metadata, rows)."""
    lines = Path(path).read_text().splitlines()
    meta = {}
    if lines and lines[0].startswith("#"):
        for item in lines[0][1:].split():
            k, _, v = item.partition("=")
            meta[k] = v
        lines = lines[1:]
    return meta, list(csv.DictReader(lines))


def _state_rows(points: list[PointResult], key_names):
    for pt in points:
        res = pt.result
        for name, vec in (("v", res.final_v), ("theta", res.final_state.theta)):
            for i, z in enumerate(vec):
                yield (pt.algorithm, *pt.key[1:], name, i, float(z.real), float(z.imag))


def _trace_rows(points: list[PointResult]):
    for pt in points:
        for k, step, it, obj, kkt in pt.trace:
            yield (pt.algorithm, *pt.key[1:], k, step, it, float(obj), float(kkt))


def _write_aux(spec, points, key_names, written):
    out = spec.output_dir
    written["states"] = write_csv(out / "states.csv",
                                  ["algorithm", *key_names, "vector", "index", "real", "imag"],
                                  _state_rows(points, key_names), spec)
    if spec.trace:
        written["trace"] = write_csv(out / "trace.csv",
                                     ["algorithm", *key_names, "outer_iteration", "step",
                                      "solver_iterations", "objective", "kkt_residual"],
                                     _trace_rows(points), spec)


def _order(algorithm):
    return ALGORITHMS.index(algorithm)


def run_convergence(spec: ExperimentSpec) -> dict:
    """Rate per outer iteration for the proposed designs at each BS power."""
    algos = [a for a in spec.algorithms if a in HYBRID] or ["fp", "ear"]
    cfg0 = spec.scenario
    tasks = []
    for P in spec.powers:
        cfg = cfg0.replace(P_dBm=P)
        for a in algos:
            tasks.append(((_order(a), P), a, cfg, cfg.M_a, spec))
    points = _dispatch(tasks, spec.workers)
    rows = []
    for pt in points:
        traj = pt.result.rate_trajectory
        for k in range(1, len(traj)):
            rows.append((pt.algorithm, pt.key[1], k, traj[k]))
    written = {"convergence": write_csv(spec.output_dir / "convergence.csv",
                                        ["algorithm", "P_dBm", "iteration", "rate"], rows, spec)}
    _write_aux(spec, points, ["P_dBm"], written)
    return written


def _active_count(spec, M):
    frac = spec.active_fraction if spec.active_fraction is not None else RATE_VS_M_ACTIVE_FRACTION
    return max(1, int(round(M * frac)))


def run_rate_vs_m(spec: ExperimentSpec) -> dict:
    """Final rate of every selected design at each IRS size."""
    tasks = []
    for M in spec.sweep:
        cfg = spec.scenario.replace(M=M, M_a=_active_count(spec, M))
        for a in spec.algorithms:
            tasks.append(((_order(a), M), a, cfg, cfg.M_a, spec))
    points = _dispatch(tasks, spec.workers)
    rows = []
    for pt in points:
        res = pt.result
        rows.append((pt.algorithm, pt.key[1], res.final_state.layout.M_a if pt.algorithm != "none" else 0,
                     res.rate, res.outer_iterations))
    written = {"rate_vs_m": write_csv(spec.output_dir / "rate_vs_m.csv",
                                      ["algorithm", "M", "M_a", "rate", "outer_iterations"], rows, spec)}
    _write_aux(spec, points, ["M"], written)
    return written


def run_complexity_vs_m(spec: ExperimentSpec) -> dict:
    """FLOP models of both designs; iteration counts measured unless fixed."""
    N = spec.scenario.N
    eps = spec.epsilon if 0 < spec.epsilon < 1 else 1e-4
    measured = {}
    if spec.fixed_iterations is None:
        tasks = []
        for M in spec.sweep:
            cfg = spec.scenario.replace(M=M, M_a=_active_count(spec, M))
            for a in ("fp", "ear"):
                tasks.append(((_order(a), M), a, cfg, cfg.M_a, spec))
        for pt in _dispatch(tasks, spec.workers):
            measured[(pt.algorithm, pt.key[1])] = max(1, pt.result.outer_iterations)
    rows = []
    for M in spec.sweep:
        if spec.fixed_iterations is None:
            L, K = measured[("fp", M)], measured[("ear", M)]
        else:
            L = K = spec.fixed_iterations
        rows.append((M, L, K, flops_fp(L, M, N, eps), flops_ear(K, M, N)))
    return {"complexity_vs_m": write_csv(spec.output_dir / "complexity_vs_m.csv",
                                         ["M", "L", "K", "flops_fp", "flops_ear"], rows, spec)}


def run_single(spec: ExperimentSpec) -> dict:
    """Every selected design on the scenario's own layout."""
    cfg = spec.scenario
    tasks = [((_order(a), cfg.M), a, cfg, cfg.M_a, spec) for a in spec.algorithms]
    points = _dispatch(tasks, spec.workers)
    rows = []
    for pt in points:
        res = pt.result
        ch = build_channels(pt.cfg, res.final_state.layout)
        snr_v = snr(ch, pt.cfg, res.final_v, res.final_state)
        power = irs_transmit_power_vector(ch, pt.cfg, res.final_v, res.final_state)
        rows.append((pt.algorithm, cfg.M, res.final_state.layout.M_a if pt.algorithm != "none" else 0,
                     res.rate, snr_v, power, res.outer_iterations, res.flops_estimate))
    written = {"single_run": write_csv(spec.output_dir / "single_run.csv",
                                       ["algorithm", "M", "M_a", "rate", "snr", "irs_power_w",
                                        "outer_iterations", "flops"], rows, spec)}
    _write_aux(spec, points, ["M"], written)
    return written


RUNNERS = {
    "convergence": run_convergence,
    "rate_vs_m": run_rate_vs_m,
    "complexity_vs_m": run_complexity_vs_m,
    "single_run": run_single,
}


def run(spec: ExperimentSpec) -> dict:
    written = RUNNERS[spec.kind](spec)
    if spec.svg:
        from .plots import render
        written.update(render(spec, written))
    return written


def load_states(path, algorithm: str, key_value) -> tuple[np.ndarray, np.ndarray]:
    """Read back (v, theta) for one algorithm/sweep point from a states CSV."""
    _, rows = read_csv(path)
    key_col = [c for c in rows[0] if c not in ("algorithm", "vector", "index", "real", "imag")][0]
    vecs = {"v": {}, "theta": {}}
    for r in rows:
        if r["algorithm"] == algorithm and math.isclose(float(r[key_col]), float(key_value)):
            vecs[r["vector"]][int(r["index"])] = complex(float(r["real"]), float(r["imag"]))
    v = np.array([vecs["v"][i] for i in range(len(vecs["v"]))])
    theta = np.array([vecs["theta"][i] for i in range(len(vecs["theta"]))])
    return v, theta
