"""Config-driven experiment runner, oracle error grids, and CSV/JSON output.

Config files are INI documents (parsed with configparser) with the sections
[system], [cost], [bases], [learner], [exploration], [outputs], [caps] and
[grid]. Vectors are whitespace-separated numbers ("0 0"); matrices separate
rows with ';' ("0 1; -1 -2"). Unknown sections or keys are rejected, and
all numeric constraints are checked at load time. See the bundled
configs/*.cfg for complete examples.
"""

from __future__ import annotations

import configparser
import json
import math
import os
from dataclasses import dataclass, field, asdict
from typing import Dict, List, Optional, Tuple

import numpy as np

from .baselines import LQRSolution, kleinman_iteration
from .basis import BasisSet, matrix_from_quad_weights, resolve_basis
from .cost import CostSpec, benchmark_cost, quadratic_cost, validate_cost
from .dynamics import SystemModel, make_benchmark, make_linear
from .errors import ConfigurationError, DivergenceError
from .exploration import ExplorationSignal, make_sinusoid_sum, no_exploration
from .learner import (LearnerConfig, TrajectoryLog, WeightState, run_episode,
                      value_estimate, policy_estimate)

Array = np.ndarray

COST_PRESETS = {"benchmark": benchmark_cost}


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    """Fully resolved experiment description (the JSON summary echoes it)."""

    label: str = "experiment"
    # [system]
    system_name: Optional[str] = None
    A: Optional[list] = None
    B: Optional[list] = None
    K0: Optional[list] = None
    # [cost]
    cost_preset: Optional[str] = None
    Q: Optional[list] = None
    R: Optional[list] = None
    # [bases]
    critic_basis: str = "quadratic"
    actor_basis: str = ""
    # [learner]
    alpha: float = 0.0
    T: float = 0.025
    h: float = 1e-3
    t_final: float = 1.0
    x0: list = field(default_factory=list)
    w_c0: list = field(default_factory=list)
    w_a0: list = field(default_factory=list)
    hold_until_full_window: bool = True
    u_max: Optional[float] = None
    # [exploration]
    expl_count: int = 0
    expl_freq_range: Tuple[float, float] = (-50.0, 50.0)
    expl_amplitude: float = 1.0
    expl_active_until: float = 0.0
    expl_seed: Optional[int] = None
    # [outputs]
    out_dir: Optional[str] = None
    log_stride: int = 1
    pe_window: Optional[int] = None
    pe_stride: Optional[int] = None
    # [caps]
    state_cap: float = 50.0
    weight_cap: float = 100.0
    # [grid]
    grid_box: Tuple[float, float] = (-1.0, 1.0)
    grid_resolution: int = 41

    def to_dict(self) -> dict:
        d = asdict(self)
        d["expl_freq_range"] = list(self.expl_freq_range)
        d["grid_box"] = list(self.grid_box)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        unknown = set(d) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ConfigurationError(f"unknown config fields: {sorted(unknown)}")
        if "expl_freq_range" in d and d["expl_freq_range"] is not None:
            d["expl_freq_range"] = tuple(d["expl_freq_range"])
        if "grid_box" in d and d["grid_box"] is not None:
            d["grid_box"] = tuple(d["grid_box"])
        return cls(**d)

    def validate(self) -> None:
        """Build every component once; raises ConfigurationError on any
        inconsistency so bad configs fail at load time."""
        model = build_model(self)
        cost = build_cost(self)
        phi_c, phi_a = build_bases(self, model)
        lcfg = build_learner_config(self)
        lcfg.validate()
        if cost.m != model.m:
            raise ConfigurationError(
                f"cost R is {cost.m}x{cost.m} but the system has m={model.m}"
            )
        if len(lcfg.x0) != model.n:
            raise ConfigurationError(
                f"x0 has length {len(lcfg.x0)}, system state dimension is {model.n}"
            )
        w = WeightState(lcfg.w_c0, lcfg.w_a0)
        if w.n_c != phi_c.dim_out:
            raise ConfigurationError(
                f"w_c0 has length {w.n_c}, critic basis {self.critic_basis!r} "
                f"has {phi_c.dim_out} features"
            )
        if w.n_a != phi_a.dim_out or w.m != model.m:
            raise ConfigurationError(
                f"w_a0 has shape ({w.n_a}, {w.m}), expected "
                f"({phi_a.dim_out}, {model.m}) for actor basis {self.actor_basis!r}"
            )
        if self.expl_count > 0:
            lo, hi = self.expl_freq_range
            if not lo < hi:
                raise ConfigurationError(
                    f"exploration freq_range must satisfy lo < hi, got [{lo}, {hi}]"
                )
        if self.grid_resolution < 2:
            raise ConfigurationError(
                f"grid resolution must be >= 2, got {self.grid_resolution}"
            )
        if not self.grid_box[0] < self.grid_box[1]:
            raise ConfigurationError(f"grid box must be ordered, got {self.grid_box}")


_FLOAT = "float"
_INT = "int"
_STR = "str"
_BOOL = "bool"
_VEC = "vector"
_MAT = "matrix"
_PAIR = "pair"

# section -> key -> (value kind, config attribute)
_SCHEMA: Dict[str, Dict[str, Tuple[str, str]]] = {
    "system": {"name": (_STR, "system_name"), "a": (_MAT, "A"),
               "b": (_MAT, "B"), "k0": (_MAT, "K0")},
    "cost": {"preset": (_STR, "cost_preset"), "q": (_MAT, "Q"),
             "r": (_MAT, "R")},
    "bases": {"critic": (_STR, "critic_basis"), "actor": (_STR, "actor_basis")},
    "learner": {"alpha": (_FLOAT, "alpha"), "t": (_FLOAT, "T"),
                "h": (_FLOAT, "h"), "t_final": (_FLOAT, "t_final"),
                "x0": (_VEC, "x0"), "w_c0": (_VEC, "w_c0"),
                "w_a0": (_MAT, "w_a0"),
                "hold_until_full_window": (_BOOL, "hold_until_full_window"),
                "u_max": (_FLOAT, "u_max")},
    "exploration": {"count": (_INT, "expl_count"),
                    "freq_range": (_PAIR, "expl_freq_range"),
                    "amplitude": (_FLOAT, "expl_amplitude"),
                    "active_until": (_FLOAT, "expl_active_until"),
                    "seed": (_INT, "expl_seed")},
    "outputs": {"out_dir": (_STR, "out_dir"), "log_stride": (_INT, "log_stride"),
                "pe_window": (_INT, "pe_window"),
                "pe_stride": (_INT, "pe_stride")},
    "caps": {"state": (_FLOAT, "state_cap"), "weight": (_FLOAT, "weight_cap")},
    "grid": {"box": (_PAIR, "grid_box"), "resolution": (_INT, "grid_resolution")},
}

_REQUIRED_LEARNER = ("alpha", "t", "h", "t_final", "x0", "w_c0", "w_a0")


def _parse_vector(text: str) -> list:
    return [float(tok) for tok in text.replace(",", " ").split()]


def _parse_matrix(text: str) -> list:
    rows = [r.strip() for r in text.split(";") if r.strip()]
    mat = [_parse_vector(r) for r in rows]
    widths = {len(r) for r in mat}
    if len(widths) > 1:
        raise ValueError("rows have unequal lengths")
    return mat


def _key_lines(text: str) -> Dict[Tuple[str, str], int]:
    """Map (section, key) -> 1-based line number, for error messages."""
    lines: Dict[Tuple[str, str], int] = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(("#", ";")):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            continue
        if section is None:
            continue
        for sep in ("=", ":"):
            if sep in line:
                key = line.split(sep, 1)[0].strip().lower()
                lines.setdefault((section, key), lineno)
                break
    return lines


def load_config(path) -> ExperimentConfig:
    """Parse and fully validate an experiment config file.

    Raises ConfigurationError naming the offending field (with its line
    number) for parse errors, unknown keys, or constraint violations.
    """
    path = os.fspath(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise ConfigurationError(f"cannot read config {path!r}: {err}") from err

    key_lines = _key_lines(text)

    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"),
                                       interpolation=None)
    try:
        parser.read_string(text, source=path)
    except configparser.Error as err:
        raise ConfigurationError(f"config parse error in {path}: {err}") from err

    cfg = ExperimentConfig()
    cfg.label = os.path.splitext(os.path.basename(path))[0]

    def fail(section, key, msg):
        line = key_lines.get((section, key))
        where = f"line {line}" if line else "line ?"
        raise ConfigurationError(f"[{section}] {key} ({where}): {msg}")

    for section in parser.sections():
        sec = section.lower()
        if sec not in _SCHEMA:
            raise ConfigurationError(
                f"unknown config section [{section}] in {path}"
            )
        for key, raw in parser.items(sec):
            if key not in _SCHEMA[sec]:
                fail(sec, key, "unknown key")
            kind, attr = _SCHEMA[sec][key]
            try:
                if kind == _FLOAT:
                    value = float(raw)
                elif kind == _INT:
                    value = int(raw)
                elif kind == _BOOL:
                    lowered = raw.strip().lower()
                    if lowered not in ("true", "false", "yes", "no", "1", "0"):
                        raise ValueError(f"not a boolean: {raw!r}")
                    value = lowered in ("true", "yes", "1")
                elif kind == _VEC:
                    value = _parse_vector(raw)
                elif kind == _MAT:
                    value = _parse_matrix(raw)
                elif kind == _PAIR:
                    vec = _parse_vector(raw)
                    if len(vec) != 2:
                        raise ValueError(f"expected two numbers, got {len(vec)}")
                    value = (vec[0], vec[1])
                else:  # _STR
                    value = raw.strip()
            except ValueError as err:
                fail(sec, key, str(err))
            setattr(cfg, attr, value)

    if parser.has_section("system"):
        if cfg.system_name is None and (cfg.A is None or cfg.B is None):
            raise ConfigurationError(
                "[system]: either 'name' or both 'A' and 'B' are required"
            )
    else:
        raise ConfigurationError(f"missing [system] section in {path}")
    if not parser.has_section("learner"):
        raise ConfigurationError(f"missing [learner] section in {path}")
    for key in _REQUIRED_LEARNER:
        if not parser.has_option("learner", key):
            raise ConfigurationError(f"[learner] {key}: required key is missing")
    if not parser.has_section("bases") or not cfg.actor_basis:
        raise ConfigurationError("[bases] actor: required key is missing")
    if cfg.cost_preset is None and cfg.Q is None:
        raise ConfigurationError("[cost]: either 'preset' or 'Q' is required")
    if cfg.Q is not None and cfg.R is None:
        raise ConfigurationError("[cost] R: required when Q is given")

    try:
        cfg.validate()
    except ConfigurationError as err:
        raise ConfigurationError(f"{path}: {err}") from err
    return cfg


# --------------------------------------------------------------------------
# component builders
# --------------------------------------------------------------------------

def build_model(cfg: ExperimentConfig) -> SystemModel:
    if cfg.system_name:
        if cfg.system_name == "benchmark":
            return make_benchmark()
        raise ConfigurationError(f"unknown system name {cfg.system_name!r}")
    if cfg.A is None or cfg.B is None:
        raise ConfigurationError("system requires a name or both A and B matrices")
    return make_linear(cfg.A, cfg.B)


def build_cost(cfg: ExperimentConfig) -> CostSpec:
    if cfg.cost_preset is not None:
        preset = COST_PRESETS.get(cfg.cost_preset)
        if preset is None:
            raise ConfigurationError(
                f"unknown cost preset {cfg.cost_preset!r}; "
                f"known: {sorted(COST_PRESETS)}"
            )
        return preset()
    if cfg.Q is None or cfg.R is None:
        raise ConfigurationError("cost requires a preset or both Q and R")
    return quadratic_cost(cfg.Q, cfg.R)


def build_bases(cfg: ExperimentConfig, model: SystemModel) -> Tuple[BasisSet, BasisSet]:
    phi_c = resolve_basis(cfg.critic_basis, model.n)
    phi_a = resolve_basis(cfg.actor_basis, model.n)
    return phi_c, phi_a


def build_exploration(cfg: ExperimentConfig, model: SystemModel) -> ExplorationSignal:
    if cfg.expl_count <= 0:
        return no_exploration(channels=model.m)
    return make_sinusoid_sum(
        count=cfg.expl_count, freq_range=cfg.expl_freq_range,
        seed=cfg.expl_seed, active_until=cfg.expl_active_until,
        amplitude=cfg.expl_amplitude, channels=model.m,
    )


def build_learner_config(cfg: ExperimentConfig) -> LearnerConfig:
    w_a0 = np.asarray(cfg.w_a0, dtype=float)
    # single-row actor weights are a vector of per-feature weights (m = 1);
    # for m > 1 write one row per feature
    if w_a0.ndim == 2 and w_a0.shape[0] == 1:
        w_a0 = w_a0[0]
    return LearnerConfig(
        alpha=cfg.alpha, T=cfg.T, h=cfg.h, t_final=cfg.t_final,
        x0=np.asarray(cfg.x0, dtype=float),
        w_c0=np.asarray(cfg.w_c0, dtype=float),
        w_a0=w_a0,
        hold_until_full_window=cfg.hold_until_full_window,
        state_cap=cfg.state_cap, weight_cap=cfg.weight_cap,
        u_max=cfg.u_max, pe_window=cfg.pe_window, pe_stride=cfg.pe_stride,
        log_stride=cfg.log_stride,
    )


def attach_lqr_oracles(model: SystemModel, cfg: ExperimentConfig,
                       cost: CostSpec) -> Tuple[SystemModel, Optional[LQRSolution]]:
    """For linear systems with quadratic cost, fill the oracles from the
    Riccati solution. Best effort: a failed solve leaves the model as is."""
    if cfg.A is None or cfg.B is None or cfg.Q is None:
        return model, None
    A = np.asarray(cfg.A, dtype=float)
    B = np.asarray(cfg.B, dtype=float)
    S = np.asarray(cfg.Q, dtype=float)
    R = np.atleast_2d(np.asarray(cfg.R, dtype=float))
    K0 = (np.asarray(cfg.K0, dtype=float) if cfg.K0 is not None
          else np.zeros((model.m, model.n)))
    try:
        sol = kleinman_iteration(A, B, S, R, K0)
    except Exception:
        return model, None
    P, K = sol.P, sol.K

    def value(x):
        return float(x @ P @ x)

    def value_grad(x):
        return 2.0 * (P @ x)

    def policy(x):
        return -(K @ x)

    return model.with_oracles(value, policy, value_grad), sol


# --------------------------------------------------------------------------
# error grids
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned evaluation grid: the same [lo, hi] interval per state
    dimension, ``resolution`` nodes per axis, covering the box exactly."""

    lo: float
    hi: float
    resolution: int
    n: int

    def points(self) -> Array:
        axes = [np.linspace(self.lo, self.hi, self.resolution)] * self.n
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=1)


@dataclass
class GridEvalReport:
    """Oracle-vs-estimate errors over an evaluation grid."""

    grid: GridSpec
    max_value_error: float
    mean_value_error: float
    max_policy_error: float
    mean_policy_error: float
    points: Array
    value_errors: Array
    policy_errors: Array

    def error_dict(self) -> dict:
        return {
            "max_value_error": self.max_value_error,
            "mean_value_error": self.mean_value_error,
            "max_policy_error": self.max_policy_error,
            "mean_policy_error": self.mean_policy_error,
        }


def eval_error_grid(W: WeightState, phi_c: BasisSet, phi_a: BasisSet,
                    model: SystemModel, grid: GridSpec) -> GridEvalReport:
    """Evaluate |V_est - V*| and ||mu_est - mu*|| at every grid node.

    Pure and order-independent; requires both oracles on the model.
    """
    if not model.has_oracles:
        raise ConfigurationError(
            f"model {model.name!r} has no closed-form oracles for grid evaluation"
        )
    pts = grid.points()
    n_pts = pts.shape[0]
    value_errors = np.empty(n_pts)
    policy_errors = np.empty(n_pts)
    for idx in range(n_pts):
        x = pts[idx]
        value_errors[idx] = abs(value_estimate(W, phi_c, x) - model.oracle_value(x))
        policy_errors[idx] = float(
            np.linalg.norm(policy_estimate(W, phi_a, x) - model.oracle_policy(x))
        )
    return GridEvalReport(
        grid=grid,
        max_value_error=float(value_errors.max()),
        mean_value_error=float(value_errors.mean()),
        max_policy_error=float(policy_errors.max()),
        mean_policy_error=float(policy_errors.mean()),
        points=pts,
        value_errors=value_errors,
        policy_errors=policy_errors,
    )


# --------------------------------------------------------------------------
# CSV / JSON output
# --------------------------------------------------------------------------

def _fmt(v: float) -> str:
    return format(v, ".17g")


def csv_header(log: TrajectoryLog) -> List[str]:
    cols = ["t"]
    cols += [f"x{i + 1}" for i in range(log.n)]
    cols += [f"u{j + 1}" for j in range(log.m)]
    cols += [f"e{j + 1}" for j in range(log.m)]
    cols += list(log.weight_labels)
    cols += ["E", "m_s", "beta1"]
    return cols


def write_csv(log: TrajectoryLog, path) -> None:
    """Write one row per logged step; 17 significant digits, '.' decimal
    point regardless of locale. E, m_s and beta1 are blank where undefined
    (before the first full window / between PE reports)."""
    header = csv_header(log)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(",".join(header) + "\n")
            for r in range(log.t.shape[0]):
                parts = [_fmt(log.t[r])]
                parts += [_fmt(v) for v in log.x[r]]
                parts += [_fmt(v) for v in log.u[r]]
                parts += [_fmt(v) for v in log.e[r]]
                parts += [_fmt(v) for v in log.weights[r]]
                for v in (log.bellman[r], log.m_s[r], log.beta1[r]):
                    parts.append("" if math.isnan(v) else _fmt(v))
                fh.write(",".join(parts) + "\n")
    except OSError as err:
        raise OSError(f"cannot write CSV log to {path!r}: {err}") from err


def read_log_csv(path) -> Tuple[List[str], Dict[str, Array]]:
    """Parse a CSV log back into column arrays; blank cells become NaN."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines:
        raise ConfigurationError(f"CSV log {path!r} is empty")
    header = lines[0].split(",")
    rows = [ln.split(",") for ln in lines[1:]]
    for r, row in enumerate(rows):
        if len(row) != len(header):
            raise ConfigurationError(
                f"CSV row {r + 2} has {len(row)} cells, expected {len(header)}"
            )
    columns = {}
    for c, name in enumerate(header):
        columns[name] = np.array(
            [float(row[c]) if row[c] != "" else np.nan for row in rows]
        )
    return header, columns


def write_grid_csv(report: GridEvalReport, path) -> None:
    n = report.grid.n
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            cols = [f"x{i + 1}" for i in range(n)] + ["value_error", "policy_error"]
            fh.write(",".join(cols) + "\n")
            for idx in range(report.points.shape[0]):
                parts = [_fmt(v) for v in report.points[idx]]
                parts.append(_fmt(report.value_errors[idx]))
                parts.append(_fmt(report.policy_errors[idx]))
                fh.write(",".join(parts) + "\n")
    except OSError as err:
        raise OSError(f"cannot write grid table to {path!r}: {err}") from err


# --------------------------------------------------------------------------
# experiment driver
# --------------------------------------------------------------------------

def run_experiment(cfg: ExperimentConfig, out_dir=None, seed_override=None,
                   quiet: bool = False) -> Tuple[TrajectoryLog, Optional[GridEvalReport]]:
    """Build all components from a config, run the episode, write outputs.

    Writes <label>_log.csv and <label>_summary.json (plus <label>_grid.csv
    when the system carries oracles) into ``out_dir``. Partial logs are
    flushed before a DivergenceError propagates.
    """
    if seed_override is not None:
        cfg.expl_seed = int(seed_override)
    model = build_model(cfg)
    cost = build_cost(cfg)
    model, _ = attach_lqr_oracles(model, cfg, cost)
    phi_c, phi_a = build_bases(cfg, model)
    expl = build_exploration(cfg, model)
    lcfg = build_learner_config(cfg)

    box = (np.full(model.n, cfg.grid_box[0]), np.full(model.n, cfg.grid_box[1]))
    report = validate_cost(cost, box)
    if report.warnings and not quiet:
        for w in report.warnings:
            print(f"[{cfg.label}] cost warning: {w}")

    directory = out_dir if out_dir is not None else (cfg.out_dir or "runs")
    os.makedirs(directory, exist_ok=True)
    csv_path = os.path.join(directory, f"{cfg.label}_log.csv")
    summary_path = os.path.join(directory, f"{cfg.label}_summary.json")
    grid_path = os.path.join(directory, f"{cfg.label}_grid.csv")

    try:
        log = run_episode(model, cost, phi_c, phi_a, expl, lcfg)
    except DivergenceError as err:
        if err.partial_log is not None:
            write_csv(err.partial_log, csv_path)
            if not quiet:
                print(f"[{cfg.label}] diverged; partial log flushed to {csv_path}")
        raise

    write_csv(log, csv_path)

    grid_report = None
    if model.has_oracles:
        grid = GridSpec(lo=cfg.grid_box[0], hi=cfg.grid_box[1],
                        resolution=cfg.grid_resolution, n=model.n)
        W = WeightState.from_stacked(log.final_weights, phi_c.dim_out,
                                     phi_a.dim_out, model.m)
        grid_report = eval_error_grid(W, phi_c, phi_a, model, grid)
        write_grid_csv(grid_report, grid_path)

    summary = dict(log.summary)
    summary["config"] = cfg.to_dict()
    summary["grid_errors"] = grid_report.error_dict() if grid_report else None
    summary["outputs"] = {
        "csv": csv_path,
        "grid_csv": grid_path if grid_report else None,
    }
    write_summary(summary, summary_path)
    if not quiet:
        wc = ", ".join(f"{v:.4f}" for v in summary["final_w_c"])
        print(f"[{cfg.label}] done: w_c = [{wc}], summary -> {summary_path}")
    return log, grid_report


def write_summary(summary: dict, path) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as err:
        raise OSError(f"cannot write summary to {path!r}: {err}") from err


def load_summary(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def eval_grid_from_summary(summary_path, out_dir=None) -> GridEvalReport:
    """Recompute the oracle error grid from a written summary file."""
    summary = load_summary(summary_path)
    cfg = ExperimentConfig.from_dict(summary["config"])
    model = build_model(cfg)
    cost = build_cost(cfg)
    model, _ = attach_lqr_oracles(model, cfg, cost)
    if not model.has_oracles:
        raise ConfigurationError(
            f"system {model.name!r} has no oracles; nothing to evaluate"
        )
    phi_c, phi_a = build_bases(cfg, model)
    W = WeightState(np.asarray(summary["final_w_c"], dtype=float),
                    np.asarray(summary["final_w_a"], dtype=float))
    grid = GridSpec(lo=cfg.grid_box[0], hi=cfg.grid_box[1],
                    resolution=cfg.grid_resolution, n=model.n)
    report = eval_error_grid(W, phi_c, phi_a, model, grid)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_grid_csv(report, os.path.join(out_dir, f"{cfg.label}_grid.csv"))
    return report


def lqr_oracle_from_config(cfg: ExperimentConfig) -> LQRSolution:
    """Solve the Riccati problem described by a linear-system config."""
    if cfg.A is None or cfg.B is None:
        raise ConfigurationError("lqr-oracle needs [system] A and B matrices")
    if cfg.Q is None or cfg.R is None:
        raise ConfigurationError("lqr-oracle needs [cost] Q and R matrices")
    A = np.asarray(cfg.A, dtype=float)
    B = np.asarray(cfg.B, dtype=float)
    m = B.shape[1] if B.ndim == 2 else 1
    K0 = (np.asarray(cfg.K0, dtype=float) if cfg.K0 is not None
          else np.zeros((m, A.shape[0])))
    return kleinman_iteration(A, B, cfg.Q, cfg.R, K0)


def analyze_pe_log(path, threshold: float = 1e-8) -> dict:
    """Summarize the PE metric column of a CSV log.

    Reports the beta1 statistics during and after the exploration phase
    (inferred from the e columns) and counts windows below the threshold.
    """
    header, cols = read_log_csv(path)
    if "beta1" not in cols or "t" not in cols:
        raise ConfigurationError(f"log {path!r} lacks t/beta1 columns")
    t = cols["t"]
    beta1 = cols["beta1"]
    e_cols = [c for c in header if c.startswith("e") and c[1:].isdigit()]
    if e_cols:
        e_active = np.zeros(len(t), dtype=bool)
        for c in e_cols:
            e_active |= np.abs(np.nan_to_num(cols[c])) > 0.0
        explore_end = float(t[e_active].max()) if e_active.any() else 0.0
    else:
        explore_end = 0.0

    valid = ~np.isnan(beta1)
    reports = int(valid.sum())
    explore_mask = valid & (t <= explore_end)
    after_mask = valid & (t > explore_end)
    explore_vals = beta1[explore_mask]
    after_vals = beta1[after_mask]
    return {
        "path": os.fspath(path),
        "threshold": threshold,
        "reports": reports,
        "explore_end": explore_end,
        "explore_windows": int(explore_mask.sum()),
        "explore_beta1_min": float(explore_vals.min()) if explore_vals.size else None,
        "explore_beta1_median": (float(np.median(explore_vals))
                                 if explore_vals.size else None),
        "after_windows": int(after_mask.sum()),
        "after_beta1_min": float(after_vals.min()) if after_vals.size else None,
        "below_threshold_explore": int((explore_vals < threshold).sum()),
        "below_threshold_after": int((after_vals < threshold).sum()),
    }
