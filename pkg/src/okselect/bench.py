"""Experiment runner: configure a learner, stream a dataset, collect
metrics, repeat over seeded permutations, and emit a CSV report.

The online protocol is predict-then-update: the mistake rate counts the
sign of the pre-update prediction against the revealed label. Repeats are
independent given their seeds; repeat r permutes the dataset with
seed + r and seeds the learner identically, so a report is reproducible
from its config alone.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from dataclasses import dataclass, field, asdict, replace

import numpy as np

from . import data as data_mod
from .hinge_learner import HingeKernelSelector, HingeSelectorConfig
from .kernels import KernelSpec, gaussian, polynomial
from .losses import HingeLoss, LogisticLoss
from .raker import RakerBaseline, RakerConfig
from .smooth_learner import SmoothKernelSelector, SmoothSelectorConfig

__all__ = ["ExperimentConfig", "Report", "run", "sweep", "alignment_probe", "load_dataset",
           "REPORT_COLUMNS", "ConfigError"]

DEFAULT_SIGMAS = (0.25, 1.0, 4.0, 16.0, 64.0)  # 2^{-2}, 2^0, ..., 2^6

REPORT_COLUMNS = [
    "dataset",
    "T",
    "algorithm",
    "loss",
    "B",
    "M",
    "U",
    "lambda_scale",
    "seed",
    "AMR_percent",
    "cum_loss",
    "alignment_proxy_min",
    "removals_per_kernel",
    "archive_size",
    "wall_time_s",
    "config",
]


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    """Declarative description of one experiment.

    ``dataset`` is a file path or a generator spec such as
    ``{"generator": "lowerbound", "budget": 50, "rounds": 20000, "seed": 1}``.
    ``U`` is either the string ``"sqrt_b"`` or an explicit radius.
    ``kernels`` may override the Gaussian grid with explicit specs, e.g.
    ``[{"kind": "polynomial", "degree": 1}]``.
    """

    dataset: object
    algorithm: str  # momd_h | momd_s | raker
    loss: str = "hinge"
    sigmas: tuple = DEFAULT_SIGMAS
    B: int = 400
    M: int = 10
    U: object = "sqrt_b"
    lambda_scale: float = 1.0
    lambda_rule: str = "scaled"
    D: int = 400
    eta: float | None = None  # raker step size; defaults to 1/sqrt(T)
    reg: float = 0.005
    repeats: int = 10
    seed: int = 0
    removal: str = "half"
    normalize: bool = True
    horizon: int | None = None
    kernels: object = None
    output: str | None = None

    def __post_init__(self):
        if self.algorithm not in ("momd_h", "momd_s", "raker"):
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if self.loss not in ("hinge", "logistic"):
            raise ConfigError(f"unknown loss {self.loss!r}")
        if self.algorithm == "momd_h" and self.loss != "hinge":
            raise ConfigError("the per-kernel-buffer learner is defined for the hinge loss")
        if self.algorithm == "momd_s" and self.loss == "hinge":
            raise ConfigError("the shared-buffer learner needs a smooth loss (logistic)")
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "dataset" not in raw or "algorithm" not in raw:
            raise ConfigError("config requires 'dataset' and 'algorithm'")
        return cls(**raw)

    def kernel_specs(self) -> tuple[KernelSpec, ...]:
        if self.kernels:
            specs = []
            for i, item in enumerate(self.kernels):
                if item.get("kind") == "polynomial":
                    specs.append(polynomial(item["degree"], index=i))
                elif item.get("kind") == "gaussian":
                    specs.append(gaussian(item["sigma"], index=i))
                else:
                    raise ConfigError(f"bad kernel spec {item!r}")
            return tuple(specs)
        return tuple(gaussian(s, index=i) for i, s in enumerate(self.sigmas))

    def radius(self) -> float | None:
        if self.U == "sqrt_b":
            return None  # learners default to sqrt(B)
        return float(self.U)

    def loss_object(self):
        return HingeLoss() if self.loss == "hinge" else LogisticLoss()


@dataclass
class Report:
    """Per-repeat rows plus mean/std aggregates over the numeric columns."""

    rows: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    NUMERIC = ["AMR_percent", "cum_loss", "alignment_proxy_min", "archive_size", "wall_time_s"]

    def formatted_rows(self) -> list[dict]:
        return [_format_row(r) for r in self.rows]

    def aggregates(self) -> tuple[dict, dict]:
        """Mean and sample std recomputed from the *formatted* per-repeat
        cells, so an independent parse of the CSV reproduces them."""
        rows = self.formatted_rows()
        mean_row = {c: "" for c in REPORT_COLUMNS}
        std_row = {c: "" for c in REPORT_COLUMNS}
        mean_row["seed"] = "mean"
        std_row["seed"] = "std"
        for col in self.NUMERIC:
            vals = [float(r[col]) for r in rows if r[col] != ""]
            if not vals:
                continue
            mean_row[col] = _fmt(float(np.mean(vals)))
            std_row[col] = _fmt(float(np.std(vals, ddof=1))) if len(vals) > 1 else _fmt(0.0)
        return mean_row, std_row

    def to_csv(self, path):
        mean_row, std_row = self.aggregates()
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(REPORT_COLUMNS) + "\n")
            for row in self.formatted_rows() + [mean_row, std_row]:
                fh.write(",".join(_csv_cell(row[c]) for c in REPORT_COLUMNS) + "\n")

    def mean(self, col: str) -> float:
        mean_row, _ = self.aggregates()
        if mean_row[col] == "":
            raise ValueError(f"no successful repeats to aggregate for {col!r}")
        return float(mean_row[col])


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def _csv_cell(x) -> str:
    s = str(x)
    if "," in s or '"' in s:
        s = '"' + s.replace('"', '""') + '"'
    return s


def _format_row(row: dict) -> dict:
    out = {}
    for c in REPORT_COLUMNS:
        v = row.get(c, "")
        out[c] = _fmt(v) if isinstance(v, float) else str(v)
    return out


def load_dataset(config: ExperimentConfig) -> data_mod.Dataset:
    spec = config.dataset
    if isinstance(spec, dict):
        if spec.get("generator") != "lowerbound":
            raise ConfigError(f"unknown generator {spec.get('generator')!r}")
        return data_mod.gen_lowerbound(
            budget=int(spec["budget"]), rounds=int(spec["rounds"]), seed=int(spec.get("seed", 0))
        )
    try:
        ds = data_mod.parse_libsvm(spec)
    except OSError as exc:
        raise ConfigError(f"cannot read dataset {spec!r}: {exc}") from exc
    if config.normalize:
        ds = data_mod.normalize_minmax(ds)
    return ds


def _build_learner(config: ExperimentConfig, ds, seed: int):
    specs = config.kernel_specs()
    if config.algorithm == "momd_h":
        return HingeKernelSelector(
            HingeSelectorConfig(
                kernels=specs,
                dim=ds.dim,
                budget=config.B,
                horizon=config.horizon or ds.num_examples,
                reservoir_size=config.M,
                ball_radius=config.radius(),
                lambda_scale=config.lambda_scale,
                lambda_rule=config.lambda_rule,
                removal=config.removal,
                seed=seed,
            )
        )
    if config.algorithm == "momd_s":
        return SmoothKernelSelector(
            SmoothSelectorConfig(
                kernels=specs,
                dim=ds.dim,
                budget=config.B,
                loss=config.loss_object(),
                ball_radius=config.radius(),
                lambda_scale=config.lambda_scale,
                lambda_rule=config.lambda_rule,
                removal=config.removal,
                seed=seed,
            )
        )
    eta = config.eta if config.eta is not None else 1.0 / math.sqrt(ds.num_examples)
    return RakerBaseline(
        RakerConfig(
            kernels=specs,
            dim=ds.dim,
            num_features=config.D,
            step_size=eta,
            reg=config.reg,
            loss=config.loss_object(),
            seed=seed,
        )
    )


def _stream(learner, ds, loss) -> dict:
    mistakes = 0
    cum = 0.0
    t0 = time.perf_counter()
    X = ds.dense_features()
    y = ds.y
    if isinstance(learner, RakerBaseline):
        for t in range(ds.num_examples):
            _, agg, label = learner.predict(X[t])
            truth = int(y[t])
            mistakes += label != truth
            cum += loss.value(agg, truth)
            learner.update(X[t], truth)
    else:
        for t in range(ds.num_examples):
            pred = learner.predict(X[t])
            truth = int(y[t])
            mistakes += pred.label != truth
            cum += loss.value(pred.aggregate, truth)
            learner.update(X[t], truth)
    wall = time.perf_counter() - t0
    return {"mistakes": mistakes, "cum_loss": cum, "wall_time_s": wall}


def run(config: ExperimentConfig) -> Report:
    """Execute the configured repeats and assemble the report.

    A repeat that raises records a failure row (empty metric cells and the
    error in the config echo) instead of aborting the whole report.
    """
    base = load_dataset(config)
    report = Report(config=asdict(config))
    echo = json.dumps(asdict(config), default=str, sort_keys=True)
    for r in range(config.repeats):
        seed = config.seed + r
        row = {
            "dataset": base.name,
            "T": base.num_examples,
            "algorithm": config.algorithm,
            "loss": config.loss,
            "B": config.B,
            "M": config.M if config.algorithm == "momd_h" else "",
            "U": "" if config.algorithm == "raker" else _fmt(config.radius() or math.sqrt(config.B)),
            "lambda_scale": config.lambda_scale,
            "seed": seed,
            "config": echo,
        }
        try:
            ds = data_mod.permute(base, seed)
            learner = _build_learner(config, ds, seed)
            loss = config.loss_object()
            stats = _stream(learner, ds, loss)
            row["AMR_percent"] = 100.0 * stats["mistakes"] / ds.num_examples
            row["cum_loss"] = stats["cum_loss"]
            row["wall_time_s"] = stats["wall_time_s"]
            if isinstance(learner, HingeKernelSelector):
                row["alignment_proxy_min"] = float(learner.alignment_proxies().min())
                row["removals_per_kernel"] = ";".join(str(int(v)) for v in learner.removals)
                row["archive_size"] = float(len(learner.reservoir.archive))
                learner.check_invariants()
            elif isinstance(learner, SmoothKernelSelector):
                row["alignment_proxy_min"] = ""
                row["removals_per_kernel"] = ";".join(
                    [str(int(learner.removals))] * len(learner.kernels)
                )
                row["archive_size"] = ""
                learner.check_invariants()
            else:
                row["alignment_proxy_min"] = ""
                row["removals_per_kernel"] = ""
                row["archive_size"] = ""
        except Exception as exc:  # noqa: BLE001 - failure rows are part of the contract
            row["AMR_percent"] = ""
            row["cum_loss"] = ""
            row["wall_time_s"] = ""
            row["alignment_proxy_min"] = ""
            row["removals_per_kernel"] = ""
            row["archive_size"] = ""
            row["config"] = f"FAILED: {type(exc).__name__}: {exc}"
        report.rows.append(row)
    if config.output:
        report.to_csv(config.output)
    return report


def sweep(config: ExperimentConfig, grid: dict) -> tuple[dict, Report, list]:
    """Explicit hyperparameter sweep: run every combination in ``grid``.

    ``grid`` maps config field names to candidate values, e.g.
    ``{"lambda_scale": [2.0, 1.0, 0.5]}`` or, for the baseline,
    ``{"eta": [...], "reg": [0.05, 0.005, 0.0005]}``. Returns the winning
    overrides (lowest mean AMR), the winning report, and every
    (overrides, report) pair. There is no hidden tuning anywhere else.
    """
    keys = sorted(grid)
    results = []
    best = None
    for values in itertools.product(*(grid[k] for k in keys)):
        overrides = dict(zip(keys, values))
        rep = run(replace(config, **overrides))
        results.append((overrides, rep))
        try:
            amr = rep.mean("AMR_percent")
        except ValueError:
            continue
        if best is None or amr < best[0]:
            best = (amr, overrides, rep)
    if best is None:
        raise ConfigError("every sweep combination failed")
    return best[1], best[2], results


def alignment_probe(config: ExperimentConfig) -> dict:
    """Data-complexity probe: one hinge-learner pass at M=30, B=400.

    Returns the per-kernel accumulated gap norms and their minimum.
    """
    if config.algorithm != "momd_h":
        raise ConfigError("the alignment probe is defined for the hinge learner")
    base = load_dataset(config)
    ds = data_mod.permute(base, config.seed)
    specs = config.kernel_specs()
    learner = HingeKernelSelector(
        HingeSelectorConfig(
            kernels=specs,
            dim=ds.dim,
            budget=400,
            horizon=config.horizon or ds.num_examples,
            reservoir_size=30,
            ball_radius=config.radius(),
            lambda_scale=config.lambda_scale,
            lambda_rule=config.lambda_rule,
            removal=config.removal,
            seed=config.seed,
        )
    )
    _stream(learner, ds, HingeLoss())
    proxies = learner.alignment_proxies()
    return {
        "per_kernel": proxies,
        "min": float(proxies.min()),
        "argmin": int(proxies.argmin()),
        "T": ds.num_examples,
    }
