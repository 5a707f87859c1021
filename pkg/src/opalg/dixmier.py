"""Log-averaged eigenvalue sums and a horizon-limited Dixmier-type limit.

For a nonincreasing eigenvalue sequence eta(k) the log means

    sigma_n = (eta(1) + ... + eta(n)) / log(1 + n)

are sampled on the geometric grid n = ceil(1.5^j). A generalized limit of
sigma must ignore finitely supported changes, so a finite head of eta, which
changes sigma_n by const / log(1 + n), must not move the estimate. The
estimator therefore fits sigma_n = A + B / log(1 + n) on short trailing
windows of the grid (the B term absorbs any finite-rank part exactly), then
smooths the local A values with repeated windowed Cesaro means. The last
smoothed value at the horizon is the estimate.

Nothing here is a proof: every verdict is relative to the sampled horizon.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DimensionError, MonotonicityError, OpalgError

GRID_RATIO = 1.5
CHUNK = 1 << 20
MAX_MATRIX_DIM = 2000

_FORMULA_NAMES = {
    "log": np.log, "sqrt": np.sqrt, "exp": np.exp, "abs": np.abs,
    "pi": math.pi, "e": math.e, "where": np.where, "minimum": np.minimum, "maximum": np.maximum,
}
_FORMULA_NODES = (
    ast.Expression, ast.BinOp, ast.UnaryOp, ast.Call, ast.Name, ast.Load, ast.Constant,
    ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd, ast.Compare,
    ast.Lt, ast.LtE, ast.Gt, ast.GtE, ast.Eq, ast.NotEq,
)


def parse_formula(text: str) -> Callable[[np.ndarray], np.ndarray]:
    """Compile an expression in ``k`` (e.g. ``"1/k"``, ``"k**-0.5"``) to a vectorized function."""
    tree = ast.parse(text.strip(), mode="eval")
    for node in ast.walk(tree):
        if not isinstance(node, _FORMULA_NODES):
            raise OpalgError(f"unsupported syntax in formula: {type(node).__name__}")
        if isinstance(node, ast.Name) and node.id != "k" and node.id not in _FORMULA_NAMES:
            raise OpalgError(f"unknown name in formula: {node.id}")
    code = compile(tree, "<formula>", "eval")

    def f(k: np.ndarray) -> np.ndarray:
        out = eval(code, {"__builtins__": {}}, {**_FORMULA_NAMES, "k": k})
        return np.broadcast_to(np.asarray(out, dtype=float), k.shape)

    return f


@dataclass(frozen=True, eq=False)
class EigenSequence:
    """eta(k) for k = 1..n_max: explicit leading values, then a formula tail (or zeros)."""

    n_max: int
    values: np.ndarray | None = None
    formula: Callable[[np.ndarray], np.ndarray] | None = None
    label: str = ""

    def __post_init__(self):
        if self.values is not None:
            v = np.asarray(self.values, dtype=float).reshape(-1)
            object.__setattr__(self, "values", v)
        if self.n_max < 1:
            raise DimensionError("n_max must be positive")

    @classmethod
    def from_formula(cls, text: str, n_max: int) -> "EigenSequence":
        return cls(int(n_max), formula=parse_formula(text), label=text)

    @classmethod
    def from_values(cls, values, n_max: int | None = None, tail: str | None = None) -> "EigenSequence":
        values = np.asarray(values, dtype=float).reshape(-1)
        n_max = len(values) if n_max is None else int(n_max)
        return cls(n_max, values, parse_formula(tail) if tail else None, label=tail or "explicit")

    def block(self, start: int, stop: int) -> np.ndarray:
        """eta(k) for start <= k < stop (1-based)."""
        k = np.arange(start, stop, dtype=float)
        out = np.zeros(len(k))
        nv = 0 if self.values is None else len(self.values)
        if nv:
            head = k <= nv
            out[head] = self.values[k[head].astype(int) - 1]
        if self.formula is not None:
            tail = k > nv
            if np.any(tail):
                out[tail] = self.formula(k[tail])
        return out


def eigen_sequence_from_matrix(T, tail: str | None = None, n_max: int | None = None, tol: float = 1e-9) -> EigenSequence:
    """Eigenvalues of a positive matrix, sorted down, optionally continued by ``tail``."""
    T = np.asarray(T, dtype=complex)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise DimensionError("matrix must be square")
    if T.shape[0] > MAX_MATRIX_DIM:
        raise DimensionError(f"explicit matrices are limited to dimension {MAX_MATRIX_DIM}")
    if np.max(np.abs(T - T.conj().T), initial=0.0) > tol:
        raise OpalgError("matrix is not Hermitian")
    w = np.sort(np.linalg.eigvalsh((T + T.conj().T) / 2))[::-1]
    if w.size and w[-1] < -tol:
        raise OpalgError("matrix is not positive")
    return EigenSequence.from_values(np.clip(w, 0.0, None), n_max=n_max, tail=tail)


def partial_sums(seq: EigenSequence, points) -> dict[int, float]:
    """S_n = eta(1) + ... + eta(n) at each requested n, with exact-rounded summation.

    Also enforces that eta is nonnegative and nonincreasing on [1, max(points)].
    """
    pts = sorted({int(p) for p in points})
    if not pts:
        return {}
    if pts[0] < 1 or pts[-1] > seq.n_max:
        raise DimensionError(f"points must lie in [1, {seq.n_max}]")
    parts: list[float] = []
    out: dict[int, float] = {}
    prev_last = math.inf
    k = 1
    for p in pts:
        while k <= p:
            stop = min(p + 1, k + CHUNK)
            blk = seq.block(k, stop)
            if np.any(blk < 0):
                raise MonotonicityError(k + int(np.argmax(blk < 0)))
            steps = np.diff(np.concatenate([[prev_last], blk]))
            if np.any(steps > 0):
                raise MonotonicityError(k + int(np.argmax(steps > 0)))
            prev_last = blk[-1]
            parts.append(math.fsum(blk))
            k = stop
        out[p] = math.fsum(parts)
    return out


def log_mean(seq: EigenSequence, n: int) -> float:
    """(eta(1) + ... + eta(n)) / log(1 + n)."""
    return partial_sums(seq, [n])[n] / math.log1p(n)


def geometric_grid(horizon: int, ratio: float = GRID_RATIO) -> np.ndarray:
    ns, j = {int(horizon)}, 0
    while True:
        n = math.ceil(ratio**j)
        if n > horizon:
            break
        ns.add(n)
        j += 1
    return np.array(sorted(ns), dtype=np.int64)


@dataclass(frozen=True, eq=False)
class LogMeanSeries:
    """sigma_n on a grid of n; ``half_values`` holds sigma at ceil(n/2) when known."""

    ns: np.ndarray
    values: np.ndarray
    half_values: np.ndarray | None = None
    sums: np.ndarray | None = field(default=None, repr=False)
    anchor_sums: dict[int, float] = field(default_factory=dict, repr=False)

    @property
    def sup_estimate(self) -> float:
        return float(np.max(self.values))

    @property
    def horizon(self) -> int:
        return int(self.ns[-1])

    def doubled(self) -> "LogMeanSeries":
        """The series (x1, x1, x2, x2, ...) sampled on the same grid."""
        if self.half_values is None:
            raise OpalgError("series was built without half-index samples")
        return LogMeanSeries(self.ns, self.half_values)


def log_mean_series(seq: EigenSequence, horizon: int | None = None, extra=()) -> LogMeanSeries:
    horizon = seq.n_max if horizon is None else int(horizon)
    ns = geometric_grid(horizon)
    halves = np.maximum(1, -(-ns // 2))
    S = partial_sums(seq, list(ns) + list(halves) + [p for p in extra if p <= horizon])
    sums = np.array([S[int(n)] for n in ns])
    values = sums / np.log1p(ns)
    half_values = np.array([S[int(h)] for h in halves]) / np.log1p(halves)
    anchors = {int(p): S[int(p)] for p in extra if p <= horizon}
    return LogMeanSeries(ns, values, half_values, sums, anchors)


def is_dixmier_bounded(seq: EigenSequence, n_max: int | None = None, growth_tol: float = 0.01) -> tuple[bool, float]:
    """Horizon-limited verdict on sup_n sigma_n < infinity.

    Bounded means sigma grew by at most ``growth_tol`` (relative) over the
    last decade before the horizon. Returns the verdict and the running sup.
    """
    series = log_mean_series(seq, n_max)
    return _bounded(series, growth_tol), series.sup_estimate


def _decade_back(series: LogMeanSeries, arr: np.ndarray) -> float:
    earlier = arr[series.ns <= max(1, series.horizon // 10)]
    return float(earlier[-1]) if earlier.size else 0.0


def _bounded(series: LogMeanSeries, growth_tol: float = 0.01) -> bool:
    ref = _decade_back(series, series.values) or float(series.values[0])
    last = float(series.values[-1])
    return not (last > 0 and last > ref * (1 + growth_tol))


@dataclass(frozen=True)
class LimitEstimate:
    estimate: float
    spread: float
    window: int
    depth: int
    dilation_shift: float | None = None


def _local_limits(L: np.ndarray, v: np.ndarray, w: int) -> np.ndarray:
    """Intercept of the least-squares fit v = A + B / L over each trailing window."""
    out = np.full(len(v), np.nan)
    for j in range(w - 1, len(v)):
        x = 1.0 / L[j - w + 1 : j + 1]
        y = v[j - w + 1 : j + 1]
        xm, ym = x.mean(), y.mean()
        sxx = np.sum((x - xm) ** 2)
        slope = np.sum((x - xm) * (y - ym)) / sxx if sxx > 0 else 0.0
        out[j] = ym - slope * xm
    return out


def _cesaro_passes(v: np.ndarray, w: int, depth: int) -> np.ndarray:
    for _ in range(depth):
        out = np.full(len(v), np.nan)
        for j in range(w - 1, len(v)):
            seg = v[j - w + 1 : j + 1]
            if not np.isnan(seg).any():
                out[j] = seg.mean()
        v = out
    return v


def _estimate(ns: np.ndarray, values: np.ndarray, depth: int, w: int) -> tuple[float, float]:
    L = np.log1p(ns.astype(float))
    limits = _cesaro_passes(_local_limits(L, values, w), w, depth)
    smooth = _cesaro_passes(values.astype(float), w, depth)
    spread = max(np.ptp(limits[-w:]), np.ptp(smooth[-w:]))
    return float(limits[-1]), float(spread)


def generalized_limit(series: LogMeanSeries, depth: int = 3, window: int = 4) -> LimitEstimate:
    """Estimate the generalized limit of sigma at the series horizon.

    ``spread`` is the oscillation over the final window of the smoothed
    local limits and of the smoothed sigma values themselves, i.e. how far
    the series still drifts at this horizon.
    """
    n = len(series.values)
    if depth < 0 or n < depth + 2:
        raise OpalgError(f"need at least depth + 2 = {depth + 2} samples, got {n}")
    w = window
    while w > 2 and (w - 1) * (depth + 1) + 1 > n:
        w -= 1
    est, spread = _estimate(series.ns, series.values, depth, w)
    shift = None
    if series.half_values is not None:
        shift = abs(est - _estimate(series.ns, series.half_values, depth, w)[0])
    return LimitEstimate(est, spread, w, depth, shift)


@dataclass(frozen=True)
class SingularityReport:
    estimate: float
    spread: float
    sup_estimate: float
    bounded: bool
    trace_class: bool
    head_shifts: dict[int, float]
    sigma_head_shifts: dict[int, float]
    dilation_shift: float | None
    horizon: int

    @property
    def head_insensitive(self) -> bool:
        return all(s <= self.spread for s in (*self.head_shifts.values(), *self.sigma_head_shifts.values()))


def singularity_witness(seq: EigenSequence, horizon: int | None = None, depth: int = 3, heads=(10, 100, 1000)) -> SingularityReport:
    """Report how the estimate reacts to finite changes of the sequence.

    ``head_shifts[m]``: change of the estimate when eta(1..m) are set to zero.
    ``sigma_head_shifts[m]``: change when the first m terms of the sigma
    sequence itself are set to zero.
    """
    series = log_mean_series(seq, horizon, extra=heads)
    lim = generalized_limit(series, depth)
    anchors = series.anchor_sums
    head_shifts, sigma_shifts = {}, {}
    for m in heads:
        if m not in anchors:
            continue
        sums = np.where(series.ns >= m, series.sums - anchors[m], 0.0)
        zeroed = LogMeanSeries(series.ns, sums / np.log1p(series.ns))
        head_shifts[m] = abs(generalized_limit(zeroed, depth).estimate - lim.estimate)
        cut = LogMeanSeries(series.ns, np.where(series.ns <= m, 0.0, series.values))
        sigma_shifts[m] = abs(generalized_limit(cut, depth).estimate - lim.estimate)
    total = float(series.sums[-1])
    trace_class = total - _decade_back(series, series.sums) <= 1e-4 * max(abs(total), 1e-300)
    return SingularityReport(
        lim.estimate, lim.spread, series.sup_estimate, _bounded(series), bool(trace_class),
        head_shifts, sigma_shifts, lim.dilation_shift, series.horizon,
    )
