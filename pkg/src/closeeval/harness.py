"""Error-study orchestration: build a boundary-value problem from a config,
sweep evaluation methods over distances eps, fit convergence orders, and
emit CSV/JSON/gnuplot reports.

Everything here is deterministic: no randomness, stable row ordering, and
floats written with their shortest round-trip representation, so reruns of
the same config produce byte-identical files.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, replace

import numpy as np

from .bie2d import dirichlet_data, harmonic_source, solve_density
from .bie3d import (Density3D, exact_point_source_3d,
                    harmonic_point_source_3d, solve_density3d)
from .closeeval2d import (CloseEvalRequest2D, asym_coefficients, dlp_ptr,
                          dlp_subtraction)
from .closeeval3d import (CloseEvalRequest3D, asym_correction_3d,
                          dlp_numerical_3d)
from .geometry2d import grid_nodes, kite, star
from .geometry3d import mushroom, unit_sphere
from .hgscatter import IntensityField, apply_L_asymptotic, apply_L_direct
from .spectral import SphericalCoeffs


class ConfigError(Exception):
    """Invalid study configuration."""


class NumericalError(Exception):
    """A solve or fit failed in a way the study cannot recover from."""


class InsufficientDataError(NumericalError):
    """Fewer than four points survive the fit filters."""


PROBLEMS_2D = ("2d-kite", "2d-star")
PROBLEMS_3D = ("3d-sphere", "3d-mushroom")
METHODS_2D = ("ptr", "sub", "asym2", "asym3")
METHODS_3D = ("numerical", "asym2")
ASYM_METHODS = frozenset({"asym2", "asym3", "hg_asym"})
ERROR_FLOOR = 1e-14

_FIT_DEFAULTS = {"2d": (1e-6, 1e-2), "3d": (1e-4, 1e-1), "hg": (1e-3, 1e-1)}
_EPS_DEFAULTS = {"2d": (1e-6, 1e-1, 25), "3d": (1e-4, 1e-1, 25),
                 "hg": (1e-3, 1e-1, 25)}


def _family(problem: str) -> str:
    if problem in PROBLEMS_2D:
        return "2d"
    if problem in PROBLEMS_3D:
        return "3d"
    return "hg"


def eps_grid(lo: float, hi: float, per_decade: int) -> tuple:
    """Descending log-uniform grid with per_decade points per factor of 10."""
    if not 0 < lo < hi:
        raise ConfigError("eps range needs 0 < lo < hi")
    if per_decade < 1:
        raise ConfigError("per-decade count must be positive")
    count = int(round(math.log10(hi/lo)*per_decade)) + 1
    grid = np.logspace(math.log10(lo), math.log10(hi), count)
    return tuple(float(e) for e in grid[::-1])


def parse_eps_range(text: str) -> tuple:
    """Parse 'lo:hi:per-decade' into a descending eps grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError("eps range must look like lo:hi:per-decade")
    try:
        lo, hi, per = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"bad eps range {text!r}: {exc}") from None
    return eps_grid(lo, hi, per)


@dataclass(frozen=True)
class StudyConfig:
    """One study: a problem, a resolution, methods, eps values, targets."""

    problem: str
    n: int
    methods: tuple = ()
    eps: tuple = ()
    targets: object = "all-nodes"
    out_dir: str = None
    cache_dir: str = None
    x0: tuple = (1.85, 1.65)
    source: tuple = (5.0, 4.0, 3.0)
    ell: float = 1.0
    fit_lo: float = 0.0
    fit_hi: float = 0.0
    slice_count: int = 16
    hg_field: tuple = ()
    hg_omega: tuple = (1.0, 0.7)

    def __post_init__(self):
        fam = _family(self.problem)
        if self.problem not in PROBLEMS_2D + PROBLEMS_3D + ("hg",):
            raise ConfigError(f"unknown problem {self.problem!r}")
        if not self.eps:
            object.__setattr__(self, "eps", eps_grid(*_EPS_DEFAULTS[fam]))
        eps = tuple(float(e) for e in self.eps)
        if any(e <= 0 for e in eps):
            raise ConfigError("eps values must be positive")
        if any(a <= b for a, b in zip(eps, eps[1:])):
            raise ConfigError("eps values must be strictly descending")
        object.__setattr__(self, "eps", eps)
        if fam != "hg":
            valid = METHODS_2D if fam == "2d" else METHODS_3D
            if not self.methods:
                raise ConfigError("method list must not be empty")
            bad = [m for m in self.methods if m not in valid]
            if bad:
                raise ConfigError(f"methods {bad} invalid for {self.problem}")
            object.__setattr__(self, "methods", tuple(self.methods))
        if self.n < 4:
            raise ConfigError("resolution n too small")
        if self.ell <= 0:
            raise ConfigError("ell must be positive")
        if not self.fit_lo or not self.fit_hi:
            lo, hi = _FIT_DEFAULTS[fam]
            object.__setattr__(self, "fit_lo", self.fit_lo or lo)
            object.__setattr__(self, "fit_hi", self.fit_hi or hi)
        if self.fit_lo >= self.fit_hi:
            raise ConfigError("fit range needs lo < hi")


_CONFIG_KEYS = {"problem", "n", "methods", "eps", "eps_range", "targets",
                "out", "cache", "x0", "source", "ell", "fit_lo", "fit_hi",
                "slice_count", "hg_field", "hg_omega"}


def config_from_dict(data: dict) -> StudyConfig:
    """Build and validate a StudyConfig from parsed JSON."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "problem" not in data:
        raise ConfigError("config requires a 'problem' key")
    problem = data["problem"]
    fam = _family(problem) if isinstance(problem, str) else "2d"
    eps = ()
    if "eps" in data and "eps_range" in data:
        raise ConfigError("give either 'eps' or 'eps_range', not both")
    if "eps" in data:
        try:
            eps = tuple(sorted((float(e) for e in data["eps"]), reverse=True))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad eps list: {exc}") from None
    elif "eps_range" in data:
        rng = data["eps_range"]
        if isinstance(rng, str):
            eps = parse_eps_range(rng)
        elif isinstance(rng, dict):
            try:
                eps = eps_grid(float(rng["lo"]), float(rng["hi"]),
                               int(rng["per_decade"]))
            except KeyError as exc:
                raise ConfigError(f"eps_range missing key {exc}") from None
        else:
            raise ConfigError("eps_range must be a string or an object")
    methods = tuple(data.get("methods", ()))
    if fam != "hg" and not methods and isinstance(problem, str):
        methods = METHODS_2D if fam == "2d" else METHODS_3D
    targets = data.get("targets", "all-nodes")
    if isinstance(targets, list):
        def _target(t):
            if isinstance(t, list):
                return tuple(float(v) for v in t)
            return t if isinstance(t, str) else float(t)
        try:
            targets = tuple(_target(t) for t in targets)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad target entry: {exc}") from None
    hg_field = tuple(tuple(row) for row in data.get("hg_field", ()))
    try:
        return StudyConfig(
            problem=problem,
            n=int(data.get("n", 128 if fam == "2d" else 16)),
            methods=methods,
            eps=eps,
            targets=targets,
            out_dir=data.get("out"),
            cache_dir=data.get("cache"),
            x0=tuple(float(v) for v in data.get("x0", (1.85, 1.65))),
            source=tuple(float(v) for v in data.get("source", (5.0, 4.0, 3.0))),
            ell=float(data.get("ell", 1.0)),
            fit_lo=float(data.get("fit_lo", 0.0)),
            fit_hi=float(data.get("fit_hi", 0.0)),
            slice_count=int(data.get("slice_count", 16)),
            hg_field=hg_field,
            hg_omega=tuple(float(v) for v in data.get("hg_omega", (1.0, 0.7))),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad config value: {exc}") from None


def load_config(path: str) -> StudyConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return config_from_dict(data)


def apply_overrides(config: StudyConfig, n=None, eps_range=None,
                    methods=None, out=None, cache=None) -> StudyConfig:
    """Fold command-line flag values into a parsed config."""
    kwargs = {}
    if n is not None:
        kwargs["n"] = int(n)
    if eps_range is not None:
        kwargs["eps"] = parse_eps_range(eps_range)
    if methods is not None:
        kwargs["methods"] = tuple(m.strip() for m in methods.split(",")
                                  if m.strip())
    if out is not None:
        kwargs["out_dir"] = out
    if cache is not None:
        kwargs["cache_dir"] = cache
    try:
        return replace(config, **kwargs) if kwargs else config
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad override: {exc}") from None


@dataclass(frozen=True)
class ResultRow:
    target: str
    eps: float
    method: str
    value: float
    exact: float
    abs_error: float


@dataclass(frozen=True)
class Rejection:
    target: str
    eps: float
    method: str
    reason: str


@dataclass(frozen=True)
class OrderFit:
    target: str
    method: str
    slope: float
    fit_lo: float
    fit_hi: float
    n_points: int


@dataclass
class ErrorStudyResult:
    """All rows, rejections, and fitted slopes from one study run."""

    config: StudyConfig
    rows: list
    rejections: list
    fits: list

    def errors_for(self, target: str, method: str):
        """(eps, abs_error) arrays for one target/method, eps descending."""
        pairs = [(r.eps, r.abs_error) for r in self.rows
                 if r.target == target and r.method == method]
        pairs.sort(key=lambda p: -p[0])
        eps = np.array([p[0] for p in pairs])
        err = np.array([p[1] for p in pairs])
        return eps, err

    def fit_for(self, target: str, method: str) -> OrderFit:
        for f in self.fits:
            if f.target == target and f.method == method:
                return f
        raise KeyError(f"no fit for {target!r}/{method!r}")


def fit_order(eps_values, errors, method: str, lo: float = 1e-6,
              hi: float = 1e-2, target: str = "") -> OrderFit:
    """Least-squares slope of log10(error) against log10(eps).

    Points outside [lo, hi] are dropped; asymptotic methods additionally
    drop errors at or below the roundoff floor so the fit reflects the
    convergent regime.  Requires at least four surviving points.
    """
    eps = np.asarray(eps_values, dtype=float)
    err = np.asarray(errors, dtype=float)
    if eps.shape != err.shape or eps.ndim != 1:
        raise ValueError("eps and error lists must be 1D and equal length")
    sel = (eps >= lo*(1 - 1e-9)) & (eps <= hi*(1 + 1e-9)) & (err > 0)
    if method in ASYM_METHODS:
        sel &= err > ERROR_FLOOR
    count = int(np.count_nonzero(sel))
    if count < 4:
        raise InsufficientDataError(
            f"only {count} points survive filtering for {method!r}")
    slope = np.polyfit(np.log10(eps[sel]), np.log10(err[sel]), 1)[0]
    return OrderFit(target, method, float(slope), lo, hi, count)


def _fmt(x: float) -> str:
    return repr(float(x))


def _targets_2d(config: StudyConfig, n: int):
    """(label, node index) pairs; free parameters snap to the nearest of
    the grid nodes t_j = -pi + 2*pi*j/n, and the label records the node."""
    if config.targets == "all-nodes":
        ks = range(n)
    elif isinstance(config.targets, tuple):
        ks = []
        for t in config.targets:
            if not isinstance(t, float):
                raise ConfigError("2D targets must be scalar parameters")
            ks.append(int(round((t + np.pi)*n/(2*np.pi))) % n)
    else:
        raise ConfigError(f"bad targets spec {config.targets!r}")
    nodes = grid_nodes(n)
    return [(_fmt(nodes[k]), k) for k in ks]


def _slice_x1x3(s0: float):
    # circle through both poles in the x1-x3 plane, parameterized by [0, 2pi)
    if s0 <= np.pi:
        return s0, 0.0
    return 2*np.pi - s0, np.pi


def _targets_3d(config: StudyConfig):
    """(label, theta, phi) triples from slices or explicit angle pairs."""
    count = config.slice_count
    specs = config.targets
    if specs == "all-nodes":
        specs = ("x1x3-slice", "x1x2-slice")
    if isinstance(specs, str):
        specs = (specs,)
    out = []
    for spec in specs:
        if spec == "x1x3-slice":
            for j in range(count):
                s0 = (j + 0.5)*2*np.pi/count
                th, ph = _slice_x1x3(s0)
                out.append((f"x1x3:{_fmt(s0)}", th, ph))
        elif spec == "x1x2-slice":
            for j in range(count):
                t0 = (j + 0.5)*2*np.pi/count
                out.append((f"x1x2:{_fmt(t0)}", np.pi/2, t0))
        elif isinstance(spec, tuple) and len(spec) == 2:
            th, ph = float(spec[0]), float(spec[1])
            out.append((f"{_fmt(th)};{_fmt(ph)}", th, ph))
        else:
            raise ConfigError(f"bad 3D target spec {spec!r}")
    return out


def _curve_for(problem: str):
    return kite() if problem == "2d-kite" else star()


def _surface_for(problem: str):
    return unit_sphere() if problem == "3d-sphere" else mushroom()


def _density_cache_path(config: StudyConfig) -> str:
    src = "_".join(_fmt(v) for v in config.source)
    name = f"density_{config.problem}_n{config.n}_src{src}.json"
    return os.path.join(config.cache_dir, name)


def _solve_3d(config: StudyConfig, surface, data) -> Density3D:
    if config.cache_dir:
        path = _density_cache_path(config)
        if os.path.exists(path):
            density = Density3D.load(path, surface, data)
            if density.N == config.n:
                return density
    try:
        density = solve_density3d(surface, data, config.n)
    except RuntimeError as exc:
        raise NumericalError(str(exc)) from None
    if config.cache_dir:
        os.makedirs(config.cache_dir, exist_ok=True)
        density.save(_density_cache_path(config))
    return density


def _sweep_2d(config: StudyConfig, rows, rejections):
    curve = _curve_for(config.problem)
    f = dirichlet_data(curve, config.x0, config.n)
    try:
        density = solve_density(curve, f, config.n)
    except RuntimeError as exc:
        raise NumericalError(str(exc)) from None
    for label, k in _targets_2d(config, config.n):
        fstar, U1, U2loc = asym_coefficients(density, k, config.ell)
        for eps in config.eps:
            try:
                req = CloseEvalRequest2D(density, k, eps, config.ell)
            except ValueError as exc:
                for m in config.methods:
                    rejections.append(Rejection(label, eps, m, str(exc)))
                continue
            exact = float(harmonic_source(req.point(), config.x0))
            for m in config.methods:
                if m == "ptr":
                    value = dlp_ptr(req)
                elif m == "sub":
                    value = dlp_subtraction(req)
                elif m == "asym2":
                    value = fstar + eps*U1
                else:
                    value = fstar + eps*U1 + eps*eps*U2loc
                rows.append(ResultRow(label, eps, m, value, exact,
                                      abs(value - exact)))


def _sweep_3d(config: StudyConfig, rows, rejections):
    surface = _surface_for(config.problem)
    data = harmonic_point_source_3d(surface, config.source)
    density = _solve_3d(config, surface, data)
    for label, th, ph in _targets_3d(config):
        fstar = float(np.asarray(
            data(np.full(1, th), np.full(1, ph))).ravel()[0])
        U1 = None
        for eps in config.eps:
            try:
                req = CloseEvalRequest3D(density, th, ph, eps, config.ell)
            except ValueError as exc:
                for m in config.methods:
                    rejections.append(Rejection(label, eps, m, str(exc)))
                continue
            if U1 is None and "asym2" in config.methods:
                U1 = asym_correction_3d(req)
            exact = float(exact_point_source_3d(req.point(), config.source))
            for m in config.methods:
                if m == "numerical":
                    value = dlp_numerical_3d(req)
                else:
                    value = fstar + eps*U1
                rows.append(ResultRow(label, eps, m, value, exact,
                                      abs(value - exact)))


def _fit_all(config: StudyConfig, rows) -> list:
    """Fit every (target, method) group that has enough usable points."""
    groups = {}
    for r in rows:
        groups.setdefault((r.target, r.method), []).append((r.eps,
                                                            r.abs_error))
    fits = []
    for (target, method), pairs in groups.items():
        eps = [p[0] for p in pairs]
        err = [p[1] for p in pairs]
        try:
            fits.append(fit_order(eps, err, method, lo=config.fit_lo,
                                  hi=config.fit_hi, target=target))
        except InsufficientDataError:
            continue
    return fits


def run_error_map(config: StudyConfig) -> ErrorStudyResult:
    """Sweep all methods over the (target, eps) set for a 2D or 3D problem.

    Evaluation points fall outside the domain for large eps at concave
    targets; those rows are recorded as rejections, not failures.
    """
    if config.problem == "hg":
        raise ConfigError("use run_hg_study for the hg problem")
    rows, rejections = [], []
    if _family(config.problem) == "2d":
        _sweep_2d(config, rows, rejections)
    else:
        _sweep_3d(config, rows, rejections)
    result = ErrorStudyResult(config, rows, rejections,
                              _fit_all(config, rows))
    if config.out_dir:
        write_outputs(result)
    return result


def _hg_field(config: StudyConfig) -> IntensityField:
    if not config.hg_field:
        raise ConfigError("hg study requires a nonempty hg_field list")
    try:
        entries = [(int(n), int(m), float(re), float(im))
                   for n, m, re, im in config.hg_field]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad hg_field entry: {exc}") from None
    N = max(n for n, _, _, _ in entries) + 1
    coeffs = SphericalCoeffs.zeros(N)
    for n, m, re, im in entries:
        if n < 0 or abs(m) > n:
            raise ConfigError(f"bad harmonic order (n={n}, m={m})")
        coeffs.c[SphericalCoeffs.index(n, m)] += re + 1j*im
    return IntensityField(coeffs)


def run_hg_study(config: StudyConfig) -> ErrorStudyResult:
    """Residual of the forward-peaked expansion against direct quadrature
    of the scattering operator, per eps, with a slope fit."""
    if config.problem != "hg":
        raise ConfigError("run_hg_study requires problem 'hg'")
    psi = _hg_field(config)
    omega = config.hg_omega
    rows, rejections = [], []
    for eps in config.eps:
        if not 0 < eps < 0.5:
            rejections.append(Rejection("hg", eps, "hg_asym",
                                        "eps outside (0, 0.5)"))
            continue
        direct = apply_L_direct(psi, omega, 1.0 - eps)
        value = apply_L_asymptotic(psi, omega, eps)
        rows.append(ResultRow("hg", eps, "hg_asym", value, direct,
                              abs(value - direct)))
    result = ErrorStudyResult(config, rows, rejections,
                              _fit_all(config, rows))
    if config.out_dir:
        write_outputs(result)
    return result


CSV_HEADER = "target_param,eps,method,value,exact,abs_error"


def write_outputs(result: ErrorStudyResult) -> dict:
    """Write results.csv, fits.json, plot.gp, and rejections.csv (if any);
    returns the path of each written file."""
    out = result.config.out_dir
    if not out:
        raise ConfigError("no output directory configured")
    os.makedirs(out, exist_ok=True)
    order = {}
    for r in result.rows + result.rejections:
        order.setdefault(r.target, len(order))
    paths = {}

    rows = sorted(result.rows,
                  key=lambda r: (order[r.target], r.method, -r.eps))
    paths["results"] = os.path.join(out, "results.csv")
    with open(paths["results"], "w", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in rows:
            fh.write(",".join([r.target, _fmt(r.eps), r.method,
                               _fmt(r.value), _fmt(r.exact),
                               _fmt(r.abs_error)]) + "\n")

    fits = sorted(result.fits, key=lambda f: (order[f.target], f.method))
    paths["fits"] = os.path.join(out, "fits.json")
    with open(paths["fits"], "w") as fh:
        json.dump({"fits": [vars(f) for f in fits]}, fh, indent=2)
        fh.write("\n")

    if result.rejections:
        rej = sorted(result.rejections,
                     key=lambda r: (order[r.target], r.method, -r.eps))
        paths["rejections"] = os.path.join(out, "rejections.csv")
        with open(paths["rejections"], "w", newline="") as fh:
            fh.write("target_param,eps,method,reason\n")
            for r in rej:
                fh.write(",".join([r.target, _fmt(r.eps), r.method,
                                   json.dumps(r.reason)]) + "\n")

    methods = sorted({r.method for r in result.rows})
    paths["plot"] = os.path.join(out, "plot.gp")
    with open(paths["plot"], "w") as fh:
        fh.write(_gnuplot_script(methods))
    return paths


def _gnuplot_script(methods) -> str:
    lines = [
        "set datafile separator ','",
        "set logscale xy",
        "set xlabel 'eps'",
        "set ylabel 'absolute error'",
        "set key outside",
        'methods = "%s"' % " ".join(methods),
        "plot for [m in methods] 'results.csv' every ::1 "
        "using 2:(strcol(3) eq m ? column(6) : NaN) title m",
    ]
    return "\n".join(lines) + "\n"


def read_results_csv(path: str) -> list:
    """Read rows written by write_outputs back into ResultRow objects."""
    rows = []
    try:
        with open(path) as fh:
            header = fh.readline().strip()
            if header != CSV_HEADER:
                raise ConfigError(f"unrecognized CSV header {header!r}")
            for line_no, line in enumerate(fh, start=2):
                parts = line.rstrip("\n").split(",")
                if len(parts) != 6:
                    raise ConfigError(f"bad CSV row at line {line_no}")
                rows.append(ResultRow(parts[0], float(parts[1]), parts[2],
                                      float(parts[3]), float(parts[4]),
                                      float(parts[5])))
    except OSError as exc:
        raise ConfigError(f"cannot read results: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"bad CSV value: {exc}") from None
    return rows


def fit_results(rows, lo: float = 1e-6, hi: float = 1e-2) -> list:
    """Group rows by (target, method) and fit each group that qualifies."""
    groups = {}
    for r in rows:
        groups.setdefault((r.target, r.method), []).append((r.eps,
                                                            r.abs_error))
    fits = []
    for (target, method), pairs in groups.items():
        try:
            fits.append(fit_order([p[0] for p in pairs],
                                  [p[1] for p in pairs],
                                  method, lo=lo, hi=hi, target=target))
        except InsufficientDataError:
            continue
    return fits
