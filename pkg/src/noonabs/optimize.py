"""
Parameter sweeps and maximization of the absorption objectives.

A :class:`SweepSpec` fixes or ranges each of ``sigma_e``, ``sigma_o``,
``sigma_p``, ``length`` (metres) and ``kappa_f``. :func:`sweep` evaluates the
Cartesian grid (threads, deterministic ordering); :func:`maximize` refines
the best grid cell with Nelder-Mead in log space.

Spec files are key-value text (an optional ``[sweep]`` header)::

    objective = pulsed              # pulsed | cw | nofilter_limit
    sigma_e = log10(11, 13.5, 12)   # 12 points, 1e11 .. 10**13.5 Hz
    sigma_o = log(1e11, 1e13, 12)
    sigma_p = 1e12
    length_mm = lin(0.1, 20, 40)
    kappa_f = 1e14
    lambda_pump = 0.4
    crystal = bbo

or a JSON object with the same keys (a result record's ``params`` block is
accepted as-is).
"""

import configparser
import itertools
import json
import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import minimize

from .absorption import REFERENCE_SETUP, evaluate, reference_result
from .biphoton import SetupParams
from .dispersion import BBO, load_crystal
from .errors import AllPointsDivergedError, DomainError, NoonAbsError
from .numerics import DEFAULT_REL_TOL

PARAMETERS = ("sigma_e", "sigma_o", "sigma_p", "length", "kappa_f")
OBJECTIVES = ("pulsed", "cw", "nofilter_limit")
THREADS_ENV = "NOONABS_THREADS"
_ALIASES = {"nofilter": "nofilter_limit"}
_RANGE_RE = re.compile(r"^\s*(log10|log|lin)\s*\(([^)]*)\)\s*$")


@dataclass(frozen=True)
class Range:
    lo: float
    hi: float
    count: int
    log: bool = True

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"range needs min < max, got {self.lo}, {self.hi}")
        if self.count < 2:
            raise DomainError("range needs at least two points")
        if self.log and self.lo <= 0:
            raise DomainError("log range needs positive bounds")

    def values(self):
        if self.log:
            return np.logspace(math.log10(self.lo), math.log10(self.hi), self.count)
        return np.linspace(self.lo, self.hi, self.count)

    def to_search(self, x):
        return math.log10(x) if self.log else x

    def from_search(self, y):
        return 10.0**y if self.log else y

    def describe(self, scale=1.0):
        kind = "log" if self.log else "lin"
        return f"{kind}({self.lo * scale!r}, {self.hi * scale!r}, {self.count})"


def default_threads():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        raise DomainError(f"{THREADS_ENV} must be an integer") from None


@dataclass(frozen=True)
class SweepSpec:
    """Values are floats (fixed) or :class:`Range` (swept); ``length`` in metres."""

    sigma_e: object
    sigma_o: object
    sigma_p: object
    length: object
    kappa_f: object
    objective: str = "pulsed"
    lambda_pump: float = 0.4
    crystal: object = BBO
    reference: SetupParams = REFERENCE_SETUP

    def __post_init__(self):
        obj = _ALIASES.get(self.objective, self.objective)
        if obj not in OBJECTIVES:
            raise DomainError(f"unknown objective {self.objective!r}")
        object.__setattr__(self, "objective", obj)
        for name in PARAMETERS:
            v = getattr(self, name)
            if not isinstance(v, Range):
                v = float(v)
                if not (math.isfinite(v) and v >= 0):
                    raise DomainError(f"{name} must be a non-negative number")
                object.__setattr__(self, name, v)

    @property
    def free(self):
        return tuple(n for n in PARAMETERS if isinstance(getattr(self, n), Range))

    def axes(self):
        return {n: (getattr(self, n).values() if n in self.free else np.array([getattr(self, n)]))
                for n in PARAMETERS}

    def setup(self, **values):
        kw = {n: (values[n] if n in values else getattr(self, n)) for n in PARAMETERS}
        return SetupParams(kw["sigma_e"], kw["sigma_o"], kw["sigma_p"], kw["length"],
                           kw["kappa_f"], self.lambda_pump, self.crystal)

    @property
    def reference_kind(self):
        return "nofilter" if self.objective == "nofilter_limit" else self.objective

    def with_reference(self):
        return self.reference.with_(lambda_pump=self.lambda_pump, crystal=self.crystal)


@dataclass(frozen=True)
class SweepPoint:
    index: tuple
    params: SetupParams
    raw: float
    scaled: float
    error_estimate: float
    error: str = ""

    @property
    def ok(self):
        return not self.error


def _parse_value(name, text):
    if isinstance(text, (int, float)):
        return float(text)
    if isinstance(text, dict):
        (kind, args), = text.items()
        text = f"{kind}({', '.join(str(a) for a in args)})"
    text = str(text).split("#", 1)[0].strip()
    m = _RANGE_RE.match(text)
    if not m:
        try:
            return float(text)
        except ValueError:
            raise DomainError(f"{name}: cannot parse {text!r}") from None
    kind, body = m.groups()
    parts = [p.strip() for p in body.split(",")]
    if len(parts) != 3:
        raise DomainError(f"{name}: range needs (min, max, count)")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise DomainError(f"{name}: bad range {text!r}") from None
    if kind == "log10":
        return Range(10.0**lo, 10.0**hi, count, log=True)
    return Range(lo, hi, count, log=(kind == "log"))


def _scale(value, factor):
    if isinstance(value, Range):
        return Range(value.lo * factor, value.hi * factor, value.count, value.log)
    return value * factor


def spec_from_mapping(data):
    """Build a :class:`SweepSpec` from CLI-unit key-values (``length_mm``)."""
    if "params" in data and isinstance(data["params"], dict):
        data = data["params"]
    data = {k.strip().lower(): v for k, v in data.items()}
    missing = [k for k in ("sigma_e", "sigma_o", "sigma_p", "length_mm", "kappa_f") if k not in data]
    if missing:
        raise DomainError(f"spec is missing keys: {', '.join(missing)}")
    values = {n: _parse_value(n, data[n]) for n in ("sigma_e", "sigma_o", "sigma_p", "kappa_f")}
    values["length"] = _scale(_parse_value("length_mm", data["length_mm"]), 1e-3)
    extra = {}
    if "objective" in data:
        extra["objective"] = str(data["objective"]).split("#", 1)[0].strip()
    if "lambda_pump" in data:
        extra["lambda_pump"] = float(_parse_value("lambda_pump", data["lambda_pump"]))
    if "crystal" in data:
        extra["crystal"] = load_crystal(str(data["crystal"]).split("#", 1)[0].strip())
    return SweepSpec(**values, **extra)


def load_spec(source):
    """Parse a spec from a path or literal text (key-value or JSON)."""
    text = str(source)
    if isinstance(source, Path) or not any(c in text for c in "\n={"):
        try:
            text = Path(text).read_text()
        except OSError as exc:
            raise DomainError(f"cannot read spec {text!r}: {exc.strerror}") from None
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            return spec_from_mapping(json.loads(text))
        except json.JSONDecodeError as exc:
            raise DomainError(f"bad JSON spec: {exc}") from None
    if not stripped.startswith("["):
        text = "[sweep]\n" + text
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise DomainError(f"bad spec file: {exc}") from None
    section = parser.sections()[0] if parser.sections() else "sweep"
    return spec_from_mapping(dict(parser[section]))


def spec_to_text(spec):
    """Inverse of :func:`load_spec` for key-value text."""
    lines = ["[sweep]", f"objective = {spec.objective}"]
    for n in PARAMETERS:
        v = getattr(spec, n)
        key, factor = ("length_mm", 1e3) if n == "length" else (n, 1.0)
        lines.append(f"{key} = {v.describe(factor) if isinstance(v, Range) else repr(v * factor)}")
    lines.append(f"lambda_pump = {spec.lambda_pump!r}")
    return "\n".join(lines) + "\n"


def _evaluate_point(spec, index, values, rel_tol, ref_raw):
    try:
        setup = spec.setup(**values)
        res = evaluate(setup, spec.reference_kind, rel_tol)
        return SweepPoint(index, setup, res.raw, res.raw / ref_raw, res.quadrature_error)
    except (NoonAbsError, ArithmeticError, ValueError) as exc:
        try:
            setup = spec.setup(**values)
        except NoonAbsError:
            setup = None
        return SweepPoint(index, setup, math.nan, math.nan, math.nan,
                          f"{type(exc).__name__}: {exc}")


def _reference_raw(spec, rel_tol):
    return reference_result(spec.reference_kind, spec.with_reference(), rel_tol).raw


def sweep(spec, threads=None, rel_tol=DEFAULT_REL_TOL):
    """Evaluate every grid point; rows ordered lexicographically by index.

    Failed points are kept with ``error`` set and NaN values.
    """
    threads = threads or default_threads()
    axes = spec.axes()
    ref_raw = _reference_raw(spec, rel_tol)
    shape = [len(axes[n]) for n in PARAMETERS]
    jobs = []
    for index in itertools.product(*(range(k) for k in shape)):
        values = {n: float(axes[n][i]) for n, i in zip(PARAMETERS, index)}
        jobs.append((index, values))

    def run(job):
        return _evaluate_point(spec, job[0], job[1], rel_tol, ref_raw)

    if threads == 1:
        return [run(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, jobs))


SWEEP_COLUMNS = ("sigma_e_Hz", "sigma_o_Hz", "sigma_p_Hz", "length_mm", "kappa_f_Hz",
                 "raw", "scaled", "error_estimate", "error")


def sweep_rows(points):
    for p in points:
        if p.params is None:
            vals = [math.nan] * 5
        else:
            s = p.params
            vals = [s.sigma_e, s.sigma_o, s.sigma_p, s.length * 1e3, s.kappa_f]
        yield vals + [p.raw, p.scaled, p.error_estimate, p.error]


@dataclass
class OptimumReport:
    best_params: SetupParams
    best_value: float
    best_raw: float
    grid_best_value: float
    sensitivity: dict
    trace: list = field(repr=False)
    converged: bool = True
    objective: str = "pulsed"

    def as_dict(self):
        return {
            "objective": self.objective,
            "best_value": self.best_value,
            "best_raw": self.best_raw,
            "grid_best_value": self.grid_best_value,
            "converged": self.converged,
            "evaluations": len(self.trace),
            "params": self.best_params.as_dict(),
            "sensitivity": self.sensitivity,
        }


def maximize(spec, tolerance=1e-4, budget=200, threads=None, rel_tol=DEFAULT_REL_TOL):
    """Coarse grid scan, then Nelder-Mead from the best cell.

    Swept axes are searched in log10 space (log ranges) or linearly, kept
    inside their ranges. Failed evaluations score -inf. Refinement stops when
    the relative objective spread of the simplex falls below ``tolerance`` or
    ``budget`` evaluations are spent.

    Raises
    ------
    AllPointsDivergedError
        If no grid point evaluates.
    """
    grid = sweep(spec, threads, rel_tol)
    trace = [(p.params, p.scaled) for p in grid]
    ok = [p for p in grid if p.ok and math.isfinite(p.scaled)]
    if not ok:
        raise AllPointsDivergedError("every grid point failed; widen or shift the ranges")
    start = max(ok, key=lambda p: p.scaled)
    grid_best = start.scaled
    free = spec.free
    ref_raw = _reference_raw(spec, rel_tol)
    cache = {}

    def value_at(values):
        key = tuple(values[n] for n in free)
        if key not in cache:
            pt = _evaluate_point(spec, (), values, rel_tol, ref_raw)
            v = pt.scaled if pt.ok and math.isfinite(pt.scaled) else -math.inf
            cache[key] = (v, pt)
            trace.append((pt.params, v))
        return cache[key]

    best_val, best_params, best_raw = start.scaled, start.params, start.raw
    converged = True

    if free:
        ranges = [getattr(spec, n) for n in free]
        x0 = np.array([r.to_search(getattr(start.params, n)) for r, n in zip(ranges, free)])
        lo = np.array([r.to_search(r.lo) for r in ranges])
        hi = np.array([r.to_search(r.hi) for r in ranges])
        steps = (hi - lo) / np.array([r.count - 1 for r in ranges])
        simplex = [x0]
        for i in range(len(free)):
            x = x0.copy()
            x[i] = x[i] + steps[i] if x[i] + steps[i] <= hi[i] else x[i] - steps[i]
            simplex.append(x)

        def neg(y):
            if np.any(y < lo) or np.any(y > hi):
                return math.inf
            values = {n: r.from_search(float(v)) for n, r, v in zip(free, ranges, y)}
            v = value_at(values)[0]
            return -v / grid_best if math.isfinite(v) else math.inf

        res = minimize(neg, x0, method="Nelder-Mead",
                       options={"initial_simplex": np.array(simplex), "maxfev": budget,
                                "xatol": 1e-6, "fatol": tolerance})
        converged = bool(res.success)
        for key, (v, pt) in cache.items():
            if v > best_val:
                best_val, best_params, best_raw = v, pt.params, pt.raw

    sensitivity = {}
    for n in free:
        entry = {}
        for label, factor in (("minus10", 0.9), ("plus10", 1.1)):
            values = {m: getattr(best_params, m) for m in free}
            values[n] = values[n] * factor
            v = value_at(values)[0]
            entry[label] = float((v - best_val) / best_val) if math.isfinite(v) else None
        sensitivity[n] = entry

    return OptimumReport(best_params, float(best_val), float(best_raw), float(grid_best), sensitivity,
                         trace, converged, spec.objective)
