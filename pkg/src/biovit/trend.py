"""Trend models for attention series: linear, exponential growth, quadratic, S-curve.

All models use the 1-based sample index ``t`` as regressor.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .session import AttentionSession


class TrendError(ValueError):
    """A model cannot be fitted to the given series."""


class ConvergenceError(TrendError):
    pass


class TrendModelKind(enum.Enum):
    LINEAR = "Linear"
    EXPONENTIAL = "ExponentialGrowth"
    QUADRATIC = "Quadratic"
    SCURVE = "SCurve"

    @classmethod
    def parse(cls, text: str) -> "TrendModelKind":
        key = text.strip().lower().replace("-", "").replace("_", "")
        aliases = {
            "linear": cls.LINEAR,
            "exponential": cls.EXPONENTIAL,
            "exponentialgrowth": cls.EXPONENTIAL,
            "growth": cls.EXPONENTIAL,
            "quadratic": cls.QUADRATIC,
            "scurve": cls.SCURVE,
            "s": cls.SCURVE,
            "logistic": cls.SCURVE,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown trend model {text!r}") from None


class QuadraticShape(enum.Enum):
    MONOTONE_INCREASING = "MonotoneIncreasing"
    MONOTONE_DECREASING = "MonotoneDecreasing"
    CONCAVE_DOWN = "ConcaveDown"
    CONCAVE_UP = "ConcaveUp"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class AccuracyMeasures:
    mape: float
    mad: float
    msd: float


@dataclass(frozen=True, eq=False)
class TrendFit:
    kind: TrendModelKind
    coefficients: tuple[float, ...]
    fitted: np.ndarray
    accuracy: AccuracyMeasures

    def __post_init__(self):
        if not all(math.isfinite(c) for c in self.coefficients):
            raise TrendError(f"nonfinite coefficients {self.coefficients}")

    def predict(self, t) -> np.ndarray:
        return predict(self.kind, self.coefficients, np.asarray(t, dtype=np.float64))


def predict(kind: TrendModelKind, coef: Sequence[float], t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    if kind is TrendModelKind.LINEAR:
        b0, b1 = coef
        return b0 + b1 * t
    if kind is TrendModelKind.QUADRATIC:
        b0, b1, b2 = coef
        return b0 + b1 * t + b2 * t * t
    if kind is TrendModelKind.EXPONENTIAL:
        b0, b1 = coef
        return b0 * np.exp(t * math.log(b1))
    b0, b1, b2, a = coef
    return 10.0**a / (b0 + b1 * np.exp(t * math.log(b2)))


def accuracy(actual, fitted) -> AccuracyMeasures:
    """MAPE (percent, over nonzero actuals), MAD and MSD of ``actual - fitted``."""
    y = np.asarray(actual, dtype=np.float64)
    f = np.asarray(fitted, dtype=np.float64)
    if y.shape != f.shape or y.ndim != 1 or y.size == 0:
        raise ValueError("actual and fitted must be nonempty and of equal length")
    e = y - f
    nz = y != 0
    if not nz.any():
        raise ValueError("MAPE undefined: all actual values are zero")
    mape = 100.0 * float(np.mean(np.abs(e[nz]) / np.abs(y[nz])))
    return AccuracyMeasures(mape, float(np.mean(np.abs(e))), float(np.mean(e * e)))


def _series(series) -> np.ndarray:
    if isinstance(series, AttentionSession):
        return series.attention
    return np.asarray(series, dtype=np.float64)


def _polyfit(y: np.ndarray, degree: int) -> tuple[tuple[float, ...], np.ndarray]:
    """OLS polynomial in t = 1..n, solved on a centred/scaled regressor."""
    n = y.size
    if n < degree + 1:
        raise TrendError(f"rank-deficient design: {n} samples for degree {degree}")
    t = np.arange(1, n + 1, dtype=np.float64)
    c = (n + 1) / 2.0
    s = max((n - 1) / 2.0, 1.0)
    u = (t - c) / s
    X = np.vander(u, degree + 1, increasing=True)
    a, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < degree + 1:
        raise TrendError("rank-deficient design matrix")
    fitted = X @ a
    # expand a_k ((t - c)/s)^k back into powers of t
    coef = np.zeros(degree + 1)
    for k, ak in enumerate(a):
        for j in range(k + 1):
            coef[j] += ak * math.comb(k, j) * (-c) ** (k - j) / s**k
    return tuple(float(v) for v in coef), fitted


def fit_linear(series) -> TrendFit:
    y = _series(series)
    if y.size < 2:
        raise TrendError("linear fit needs at least 2 samples")
    coef, fitted = _polyfit(y, 1)
    return TrendFit(TrendModelKind.LINEAR, coef, fitted, accuracy(y, fitted))


def fit_quadratic(series) -> TrendFit:
    """Least-squares fit of ``Y_t = b0 + b1 t + b2 t^2``."""
    y = _series(series)
    if y.size < 3:
        raise TrendError("quadratic fit needs at least 3 samples")
    coef, fitted = _polyfit(y, 2)
    return TrendFit(TrendModelKind.QUADRATIC, coef, fitted, accuracy(y, fitted))


def fit_exponential(series) -> TrendFit:
    """``Y_t = b0 * b1**t`` by OLS on log Y, fitted values back-transformed."""
    y = _series(series)
    if y.size < 2:
        raise TrendError("exponential fit needs at least 2 samples")
    if np.any(y <= 0):
        raise TrendError("exponential fit requires all values > 0")
    (l0, l1), _ = _polyfit(np.log(y), 1)
    coef = (math.exp(l0), math.exp(l1))
    t = np.arange(1, y.size + 1, dtype=np.float64)
    fitted = np.exp(l0 + l1 * t)
    return TrendFit(TrendModelKind.EXPONENTIAL, coef, fitted, accuracy(y, fitted))


SCURVE_MAX_ITER = 200
SCURVE_RTOL = 1e-10


def _scurve_start(z: np.ndarray) -> tuple[float, float, float]:
    """Three-sums estimate for ``z_t = c + b r**t`` (z = 10**a / Y)."""
    n = z.size
    m = n // 3
    s1, s2, s3 = (z[k * m : (k + 1) * m].sum() for k in range(3))
    d1, d2 = s2 - s1, s3 - s2
    if d1 != 0 and d2 / d1 > 0 and d2 != d1:
        rm = d2 / d1
        r = rm ** (1.0 / m)
        if math.isfinite(r) and r > 0 and r != 1:
            b = d1 * (r - 1) / (r * (rm - 1) ** 2)
            c = (s1 - b * r * (rm - 1) / (r - 1)) / m
            if all(math.isfinite(v) for v in (b, c)):
                return c, b, math.log(r)
    return float(z.mean()), 0.0, -1.0 / n


def fit_scurve(series, max_iter: int = SCURVE_MAX_ITER, rtol: float = SCURVE_RTOL) -> TrendFit:
    """Pearl-Reed logistic ``Y_t = 10**a / (b0 + b1 * b2**t)``.

    ``a`` is fixed from the data magnitude (smallest power of ten not below
    max Y); the remaining three coefficients are fitted by damped
    Gauss-Newton (Levenberg-Marquardt) on the raw residuals.
    """
    y = _series(series)
    n = y.size
    if n < 4:
        raise TrendError("S-curve fit needs at least 4 samples")
    if np.any(y <= 0):
        raise TrendError("S-curve fit requires all values > 0")
    a = float(math.ceil(math.log10(float(y.max()))))
    scale = 10.0**a
    t = np.arange(1, n + 1, dtype=np.float64)

    def model(p):
        c, b, lr = p
        g = c + b * np.exp(lr * t)
        return g

    def sse_of(p):
        g = model(p)
        if not np.all(np.isfinite(g)) or np.any(g <= 0):
            return math.inf, None
        r = y - scale / g
        return float(r @ r), g

    p = np.array(_scurve_start(scale / y), dtype=np.float64)
    sse, g = sse_of(p)
    if g is None:
        p = np.array([float((scale / y).mean()), 0.0, -1.0 / n])
        sse, g = sse_of(p)
    floor = 1e-28 * float(y @ y)
    lam = 1e-3
    converged = sse <= floor
    it = 0
    while not converged and it < max_iter:
        it += 1
        c, b, lr = p
        ert = np.exp(lr * t)
        dfdg = scale / (g * g)  # d f / d g with f = scale / g, sign folded below
        J = np.column_stack((dfdg, dfdg * ert, dfdg * b * t * ert))
        r = y - scale / g
        JtJ = J.T @ J
        Jtr = -(J.T @ r)
        diag = np.diag(JtJ).copy()
        diag[diag == 0] = 1.0
        while True:
            try:
                step = np.linalg.solve(JtJ + lam * np.diag(diag), Jtr)
            except np.linalg.LinAlgError:
                step = None
            if step is not None:
                new_sse, new_g = sse_of(p + step)
                if new_sse < sse:
                    break
            lam *= 10.0
            if lam > 1e16:
                # no descent direction left at working precision
                converged = True
                break
        if converged:
            break
        p = p + step
        rel = (sse - new_sse) / max(sse, floor)
        sse, g = new_sse, new_g
        lam = max(lam / 10.0, 1e-12)
        converged = rel < rtol or sse <= floor
    if not converged:
        raise ConvergenceError(f"S-curve did not converge in {max_iter} iterations")
    c, b, lr = p
    coef = (float(c), float(b), float(math.exp(lr)), a)
    fitted = scale / model(p)
    return TrendFit(TrendModelKind.SCURVE, coef, fitted, accuracy(y, fitted))


FITTERS = {
    TrendModelKind.LINEAR: fit_linear,
    TrendModelKind.EXPONENTIAL: fit_exponential,
    TrendModelKind.QUADRATIC: fit_quadratic,
    TrendModelKind.SCURVE: fit_scurve,
}


def fit(series, kind: TrendModelKind) -> TrendFit:
    return FITTERS[kind](series)


class ModelSelection(NamedTuple):
    best: TrendModelKind
    fits: list[TrendFit]
    skipped: dict[TrendModelKind, str]


def select_model(series, kinds: Sequence[TrendModelKind] = tuple(TrendModelKind)) -> ModelSelection:
    """Fit every candidate and keep the lowest MAPE (ties: MAD, then MSD)."""
    fits: list[TrendFit] = []
    skipped: dict[TrendModelKind, str] = {}
    for kind in kinds:
        try:
            fits.append(fit(series, kind))
        except (TrendError, ValueError) as exc:
            skipped[kind] = str(exc)
    if not fits:
        raise TrendError("no trend model could be fitted: " + "; ".join(skipped.values()))
    best = min(fits, key=lambda f: (f.accuracy.mape, f.accuracy.mad, f.accuracy.msd))
    return ModelSelection(best.kind, fits, skipped)


def shape_from_coefficients(b1: float, b2: float, tol: float = 0.0) -> QuadraticShape:
    if abs(b1) <= tol or abs(b2) <= tol:
        return QuadraticShape.DEGENERATE
    if b1 > 0 and b2 > 0:
        return QuadraticShape.MONOTONE_INCREASING
    if b1 < 0 and b2 < 0:
        return QuadraticShape.MONOTONE_DECREASING
    if b1 > 0:
        return QuadraticShape.CONCAVE_DOWN
    return QuadraticShape.CONCAVE_UP


def classify_shape(fit: TrendFit) -> QuadraticShape:
    """Shape of a quadratic trend from the signs of its t and t^2 coefficients.

    Coefficients smaller than 1e-12 times the series level count as zero.
    """
    if fit.kind is not TrendModelKind.QUADRATIC:
        raise TrendError(f"shape classification needs a quadratic fit, got {fit.kind.value}")
    _, b1, b2 = fit.coefficients
    level = abs(float(np.mean(fit.fitted))) if len(fit.fitted) else 0.0
    return shape_from_coefficients(b1, b2, 1e-12 * level)


def _signed(v: float, digits: int) -> str:
    sign = "-" if math.copysign(1.0, v) < 0 else "+"
    return f"{sign} {abs(v):.{digits}f}"


def equation(fit: TrendFit, compact: bool = True) -> str:
    """Render a fitted trend as an equation string.

    ``compact`` rounds to 3 decimals for the constant and 6 for the
    slope terms; otherwise coefficients are written at full precision.
    """
    c = fit.coefficients
    if compact:
        d0, d1 = 3, 6
        f0 = lambda v: f"{v:.{d0}f}"  # noqa: E731
        sg = lambda v: _signed(v, d1)  # noqa: E731
    else:
        f0 = repr
        sg = lambda v: ("- " if math.copysign(1.0, v) < 0 else "+ ") + repr(abs(v))  # noqa: E731
    if fit.kind is TrendModelKind.LINEAR:
        return f"Yt = {f0(c[0])} {sg(c[1])} × t"
    if fit.kind is TrendModelKind.QUADRATIC:
        return f"Yt = {f0(c[0])} {sg(c[1])} × t {sg(c[2])} × t²"
    if fit.kind is TrendModelKind.EXPONENTIAL:
        base = f"{c[1]:.6f}" if compact else repr(c[1])
        return f"Yt = {f0(c[0])} × ({base}**t)"
    b2 = f"{c[2]:.6f}" if compact else repr(c[2])
    b1 = f"{c[1]:.6f}" if compact else repr(c[1])
    return f"Yt = (10**{int(c[3])}) / ({f0(c[0])} + {b1} × ({b2}**t))"
