"""Batch evaluation behind the command line: single solves, grid sweeps and
opaque-limit convergence studies.

Every grid point is computed independently of every other, and rows are
written in grid order, so output bytes do not depend on the worker count.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import ConfigError, ScenarioConfig
from .matching import measured, scatter
from .model import ScatteringSolution, Variant
from .oracles import closed_form_arrays

SWEEP_COLUMNS = (
    "r_raw", "t_raw_flux", "r_meas", "t_meas", "r_closed", "t_closed",
    "r_diff", "t_diff", "sum_rule_lhs", "sum_rule_rhs",
)
AMPLITUDE_COLUMNS = (
    "R_re", "R_im", "T_re", "T_im", "A_re", "A_im", "b_scaled_re", "b_scaled_im",
)
SOLVE_COLUMNS = AMPLITUDE_COLUMNS + ("t_raw",) + SWEEP_COLUMNS + ("residual", "conditioning")

COLUMN_DOC = {
    "r_raw": "|R|^2",
    "t_raw_flux": "(k2/k1)|T|^2",
    "r_meas": "measured reflection probability",
    "t_meas": "measured transmission probability",
    "r_closed": "closed-form reflection (blank if none applies)",
    "t_closed": "closed-form transmission (blank if none applies)",
    "r_diff": "r_meas - r_closed",
    "t_diff": "t_meas - t_closed",
    "sum_rule_lhs": "r_meas + t_meas (case4 and source-free only)",
    "sum_rule_rhs": "1 + S2(a)^2 (case4 and source-free only)",
}

MIN_CONVERGE_POINTS = 4


def format_value(value) -> str:
    """Shortest round-trip decimal for floats, empty string for missing."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _chunks(n, workers):
    workers = max(1, min(workers, n))
    bounds = np.linspace(0, n, workers + 1).astype(int)
    return [slice(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]


def evaluate_points(configs: list[ScenarioConfig], workers: int = 1) -> list[dict]:
    """Solve every config and return one result dict per point, in order.

    All configs must share a variant. Points are split into ``workers``
    contiguous chunks which are solved concurrently.
    """
    if not configs:
        return []
    variant = configs[0].variant
    systems = [c.system() for c in configs]
    edges = [c.scenario().edge_data() for c in configs]
    cols = {
        name: np.array([getattr(s, name) for s in systems])
        for name in ("k1", "k2", "chi0", "a")
    }
    for i, name in enumerate(("s1_0", "s1p_0", "s2_a", "s2p_a")):
        cols[name] = np.array([e.as_tuple()[i] for e in edges])

    def run(sl):
        return scatter(cols["k1"][sl], cols["k2"][sl], cols["chi0"][sl], cols["a"][sl], variant,
                       cols["s1_0"][sl], cols["s1p_0"][sl], cols["s2_a"][sl], cols["s2p_a"][sl])

    slices = _chunks(len(configs), workers)
    if len(slices) == 1:
        parts = [run(slices[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(slices)) as pool:
            parts = list(pool.map(run, slices))
    out = {key: np.concatenate([p[key] for p in parts]) for key in parts[0]}

    rows = []
    for i, (cfg, sys, ed) in enumerate(zip(configs, systems, edges)):
        row = {key: out[key][i] for key in out}
        if cfg.window:
            sol = ScatteringSolution(complex(row["R"]), complex(row["T"]), complex(row["A"]), 0j,
                                     complex(row["b_scaled"]), sys.k1, sys.k2)
            m = measured(sol, sys, cfg.scenario(), window=cfg.window)
            row["r_meas"], row["t_meas"] = m.r_meas_sq, m.t_meas_sq
        row["edge"] = ed
        row["system"] = sys
        rows.append(row)
    _attach_closed(rows, variant)
    return rows


def _attach_closed(rows, variant):
    for row in rows:
        sys, ed = row["system"], row["edge"]
        r_closed = t_closed = None
        if sys.k1 == sys.k2 and variant is not Variant.GENERAL:
            try:
                r, t = closed_form_arrays(variant, sys.k1, sys.chi0, sys.a, *ed.as_tuple())
                r_closed, t_closed = float(r), float(t)
            except ArithmeticError:
                pass
        row["r_closed"], row["t_closed"] = r_closed, t_closed
        row["r_diff"] = None if r_closed is None else float(row["r_meas"]) - r_closed
        row["t_diff"] = None if t_closed is None else float(row["t_meas"]) - t_closed
        if variant in (Variant.CASE4, Variant.SOURCE_FREE):
            row["sum_rule_lhs"] = float(row["r_meas"]) + float(row["t_meas"])
            row["sum_rule_rhs"] = 1.0 + ed.s2_a**2
        else:
            row["sum_rule_lhs"] = row["sum_rule_rhs"] = None
        for name in ("R", "T", "A", "b_scaled"):
            z = complex(row[name])
            row[name + "_re"], row[name + "_im"] = z.real, z.imag


@dataclass
class SolveReport:
    values: dict
    tolerance: float

    @property
    def agrees(self):
        diffs = [self.values[k] for k in ("r_diff", "t_diff") if self.values[k] is not None]
        if not diffs:
            return None
        return all(abs(d) <= self.tolerance for d in diffs)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("# kleinslab solve report; diffs compared at tolerance "
                  f"{format_value(self.tolerance)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        cols = list(SOLVE_COLUMNS) + ["within_tolerance"]
        writer.writerow(cols)
        vals = dict(self.values, within_tolerance=self.agrees)
        writer.writerow([format_value(vals[c]) for c in cols])
        return buf.getvalue()


def run_solve(cfg: ScenarioConfig, tolerance: float = 1e-6) -> SolveReport:
    """Solve the base point of a config (sweep axes are ignored)."""
    row = evaluate_points([cfg])[0]
    return SolveReport({c: row[c] for c in SOLVE_COLUMNS}, tolerance)


def run_sweep(cfg: ScenarioConfig, workers: int = 1) -> str:
    """Evaluate the config's sweep grid and return the CSV text."""
    grid = cfg.grid()
    params = [ax.param for ax in cfg.axes]
    configs = [cfg.with_values(point) for point in grid]
    rows = evaluate_points(configs, workers=workers)
    buf = io.StringIO()
    doc = "; ".join(f"{c}={COLUMN_DOC[c]}" for c in SWEEP_COLUMNS)
    buf.write(f"# kleinslab sweep variant={cfg.variant.value}; swept={','.join(params) or 'none'}; {doc}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(params + list(SWEEP_COLUMNS))
    for point, row in zip(grid, rows):
        writer.writerow([format_value(point[p]) for p in params]
                        + [format_value(row[c]) for c in SWEEP_COLUMNS])
    return buf.getvalue()


@dataclass
class ConvergenceReport:
    opacities: np.ndarray
    r_meas: np.ndarray
    t_meas: np.ndarray
    r_closed: np.ndarray
    t_closed: np.ndarray
    errors: np.ndarray
    slope: float
    intercept: float

    @property
    def slope_deviation(self) -> float:
        """Relative deviation of the fitted slope from -2."""
        return abs(self.slope + 2.0) / 2.0

    def to_csv(self, tolerance: float = 0.15) -> str:
        buf = io.StringIO()
        buf.write(f"# fitted log-error slope per unit chi0*a: {format_value(self.slope)}\n")
        buf.write(f"# relative deviation from -2: {format_value(self.slope_deviation)} "
                  f"(within {format_value(tolerance)}: {'yes' if self.slope_deviation <= tolerance else 'no'})\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["opacity", "r_meas", "t_meas", "r_closed", "t_closed", "abs_error"])
        for row in zip(self.opacities, self.r_meas, self.t_meas, self.r_closed, self.t_closed, self.errors):
            writer.writerow([format_value(v) for v in row])
        return buf.getvalue()


def run_converge(cfg: ScenarioConfig, opacity_grid) -> ConvergenceReport:
    """Compare numeric measured probabilities with the closed form over opacities.

    ``a`` is set to ``opacity / chi0`` at each grid point. The error per point
    is ``max(|r_meas - r_closed|, |t_meas - t_closed|)`` and the slope comes
    from a least-squares line through ``log(error)`` against opacity.
    """
    grid = np.asarray(list(opacity_grid), dtype=float)
    if grid.size < MIN_CONVERGE_POINTS:
        raise ConfigError(f"insufficient opacity grid: need >= {MIN_CONVERGE_POINTS} points, got {grid.size}")
    if np.any(grid <= 0) or not np.all(np.isfinite(grid)):
        raise ConfigError("opacities must be finite and > 0")
    if cfg.variant is Variant.GENERAL:
        raise ConfigError("no closed-form oracle for the general variant")
    if cfg.k2 is not None and cfg.k2 != cfg.k1:
        raise ConfigError("closed-form oracles need k2 == k1")
    configs = [cfg.with_values({"system.opacity": float(op)}) for op in grid]
    rows = evaluate_points(configs)
    if any(row["r_closed"] is None for row in rows):
        raise ConfigError("closed-form oracle unavailable for this config")
    get = lambda key: np.array([float(row[key]) for row in rows])
    errors = np.maximum(np.abs(get("r_diff")), np.abs(get("t_diff")))
    tiny = np.finfo(float).tiny
    slope, intercept = np.polyfit(grid, np.log(np.maximum(errors, tiny)), 1)
    return ConvergenceReport(grid, get("r_meas"), get("t_meas"), get("r_closed"), get("t_closed"),
                             errors, float(slope), float(intercept))
