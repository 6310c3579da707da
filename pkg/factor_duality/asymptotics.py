"""
Numerical counterparts of the asymptotic formulas: the Dickman function, the
truncated asymptotic series of li(x) and least-squares fits of leading terms
to computed partial sums.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from .counting import psi_smooth
from .errors import (
    AlphaOutOfRangeError,
    StepTooCoarseError,
    UnderdeterminedFitError,
    UnknownModelError,
    UnsupportedOrderError,
)
from .partial_sums import PartialSumSeries
from .sieve import Sweep

ALPHA_MAX = 50.0
COARSEST_STEP = 1 / 64
QUADRATURE_ORDER = 8
# grid points of the Lagrange interpolant for rho(u - 1)
STENCIL = 8
LI_MIN_X = 100
LI_MAX_ORDER = 10
FIT_MIN_POINTS = 8
FIT_MIN_DECADES = 3.0


@dataclass(frozen=True, eq=False)
class RhoTable:
    """rho(i * step) for i = 0..len(values) - 1."""

    step: float
    values: np.ndarray
    order: int = QUADRATURE_ORDER

    @property
    def points_per_unit(self) -> int:
        return round(1 / self.step)

    @property
    def alpha_max(self) -> float:
        return (len(self.values) - 1) / self.points_per_unit

    @property
    def alphas(self) -> np.ndarray:
        return np.arange(len(self.values)) / self.points_per_unit

    def __call__(self, alpha: float) -> float:
        if alpha < 0 or alpha > self.alpha_max:
            raise AlphaOutOfRangeError(alpha, self.alpha_max)
        if alpha <= 1:
            return 1.0
        n = self.points_per_unit
        position = alpha * n
        i = int(position)
        fraction = position - i
        if fraction == 0:
            return float(self.values[i])
        unit, cell = divmod(i, n)
        previous = self.values[(unit - 1) * n : unit * n + 1]
        integral = _integrate_cells(
            previous,
            np.array([cell]),
            fraction,
            unit,
            self.order,
        )
        return float(self.values[i] - integral[0])


def _lagrange_basis(positions: np.ndarray) -> np.ndarray:
    """Values of the Lagrange basis on the nodes 0..STENCIL-1 at `positions`."""
    nodes = np.arange(STENCIL)
    offsets = positions[..., None] - nodes
    basis = np.empty(offsets.shape)
    for j in range(STENCIL):
        others = np.delete(nodes, j)
        basis[..., j] = np.prod(offsets[..., others], axis=-1) / np.prod(j - others)
    return basis


def _integrate_cells(
    previous: np.ndarray,
    cells: np.ndarray,
    upper: float,
    unit: int,
    order: int,
) -> np.ndarray:
    """
    Integral of rho(u - 1) / u over the first `upper` (in grid steps) of every
    cell of the unit interval [unit, unit + 1], given rho on the grid of
    [unit - 1, unit] in `previous`.
    """
    n = len(previous) - 1
    nodes, weights = leggauss(order)
    local = cells[:, None] + upper * (nodes + 1) / 2
    # stay inside [unit - 1, unit], rho is only piecewise smooth
    start = np.clip(cells - (STENCIL // 2 - 1), 0, n + 1 - STENCIL)
    basis = _lagrange_basis(local - start[:, None])
    stencil = previous[start[:, None] + np.arange(STENCIL)]
    shifted = np.einsum("cgs,cs->cg", basis, stencil)
    u = unit + local / n
    return upper / (2 * n) * ((shifted / u) @ weights)


@lru_cache(maxsize=16)
def _rho_grid(n: int, units: int, order: int) -> RhoTable:
    values = np.ones(units * n + 1)
    cells = np.arange(n)
    for unit in range(1, units):
        previous = values[(unit - 1) * n : unit * n + 1]
        integrals = _integrate_cells(previous, cells, 1.0, unit, order)
        values[unit * n + 1 : (unit + 1) * n + 1] = values[unit * n] - np.cumsum(
            integrals,
        )
    values.flags.writeable = False
    return RhoTable(step=1 / n, values=values, order=order)


def check_step(step: float) -> int:
    """Grid points per unit interval for `step`, which has to be 1/N."""
    n = round(1 / step) if step > 0 else 0
    if n < 1 / COARSEST_STEP or not math.isclose(n * step, 1.0, rel_tol=1e-12):
        raise StepTooCoarseError(step, COARSEST_STEP)
    return n


def build_rho_table(
    alpha_max: float,
    step: float = COARSEST_STEP,
    order: int = QUADRATURE_ORDER,
) -> RhoTable:
    """
    March rho(alpha) = 1 - int_1^alpha rho(u - 1) / u du over unit intervals.

    Every grid cell is integrated with `order`-point Gauss-Legendre, rho(u - 1)
    is interpolated from the grid of the previous unit interval.
    """
    if not 0 <= alpha_max <= ALPHA_MAX:
        raise AlphaOutOfRangeError(alpha_max, ALPHA_MAX)
    n = check_step(step)
    return _rho_grid(n, max(1, math.ceil(alpha_max)), order)


def dickman_rho(alpha: float, step: float = COARSEST_STEP) -> float:
    if not 0 <= alpha <= ALPHA_MAX:
        raise AlphaOutOfRangeError(alpha, ALPHA_MAX)
    return build_rho_table(alpha, step)(alpha)


def rho_step_halving_error(alpha_max: float, step: float = COARSEST_STEP) -> float:
    """Largest change of rho on the `step` grid when the step is halved."""
    coarse = build_rho_table(alpha_max, step)
    fine = build_rho_table(alpha_max, step / 2)
    return float(np.max(np.abs(fine.values[::2] - coarse.values)))


def smooth_vs_rho(
    x: int,
    y: int,
    step: float = COARSEST_STEP,
    sweep: Sweep | None = None,
) -> tuple[int, float, float]:
    """Psi(x, y), the prediction x rho(log x / log y) and their ratio."""
    count = psi_smooth(x, y, sweep).count
    alpha = math.log(x) / math.log(y)
    prediction = x * dickman_rho(alpha, step)
    return count, prediction, count / prediction


def li_series(x: float, nu: int) -> float:
    """sum_{i=1}^{nu} (i - 1)! x / (log x)^i"""
    if x < LI_MIN_X:
        raise UnsupportedOrderError("x", x, LI_MIN_X, math.inf)
    if not 1 <= nu <= LI_MAX_ORDER:
        raise UnsupportedOrderError("nu", nu, 1, LI_MAX_ORDER)
    log_x = math.log(x)
    total = 0.0
    for i in range(1, nu + 1):
        total += math.factorial(i - 1) * x / log_x**i
    return total


@dataclass(frozen=True)
class ModelForm:
    """
    sum_t c_t (log log x)^d_t / (log x)^e_t, times x if `x_factor` is set.
    """

    terms: tuple[tuple[int, int], ...]
    x_factor: bool = False
    name: str = ""

    def basis(self, x: np.ndarray) -> np.ndarray:
        log_x = np.log(x)
        loglog_x = np.log(log_x)
        columns = [loglog_x**d / log_x**e for d, e in self.terms]
        matrix = np.column_stack(columns)
        return matrix * x[:, None] if self.x_factor else matrix

    @property
    def descriptor(self) -> str:
        terms = ",".join(f"{d}:{e}" for d, e in self.terms)
        return f"x*{terms}" if self.x_factor else terms

    def __str__(self) -> str:
        return self.name or self.descriptor


MODEL_PRESETS = {
    "inverse-log": ModelForm(((0, 1),), name="inverse-log"),
    "loglog-over-log": ModelForm(((1, 1), (0, 1)), name="loglog-over-log"),
    "x-loglog-over-log2": ModelForm(
        ((1, 2), (0, 2)),
        x_factor=True,
        name="x-loglog-over-log2",
    ),
    "constant": ModelForm(((0, 0),), name="constant"),
}


def parse_model(descriptor: str) -> ModelForm:
    """A preset name or `[x*]d:e[,d:e...]`."""
    if descriptor in MODEL_PRESETS:
        return MODEL_PRESETS[descriptor]
    body = descriptor.strip()
    x_factor = body.startswith("x*")
    if x_factor:
        body = body[2:]
    try:
        terms = tuple(
            (int(d), int(e)) for d, e in (term.split(":") for term in body.split(","))
        )
    except ValueError:
        raise UnknownModelError(descriptor, list(MODEL_PRESETS)) from None
    if any(d < 0 or e < 0 for d, e in terms) or len(set(terms)) != len(terms):
        raise UnknownModelError(descriptor, list(MODEL_PRESETS))
    return ModelForm(terms, x_factor=x_factor)


@dataclass(frozen=True)
class FitReport:
    kind: str
    model: ModelForm
    checkpoints: list[int]
    coefficients: list[float]
    residuals: list[float]

    @property
    def residual_norm(self) -> float:
        return float(np.linalg.norm(self.residuals))

    def predict(self, x: Sequence[float]) -> np.ndarray:
        return self.model.basis(np.asarray(x, dtype=float)) @ np.array(
            self.coefficients,
        )


def fit_leading_term(
    series: PartialSumSeries,
    model: ModelForm,
    window: tuple[int, int] | None = None,
) -> FitReport:
    """
    Ordinary least-squares fit of `model` to the series over the checkpoints
    in `window`. Rows are multiplied through by the largest log x power of
    the model (and divided by x for models with an x factor) before solving;
    residuals are reported on the original scale.
    """
    lo, hi = window if window is not None else (3, math.inf)
    points = [
        (c, float(v))
        for c, v in zip(series.checkpoints, series.values, strict=True)
        if max(lo, 3) <= c <= hi
    ]
    decades = math.log10(points[-1][0] / points[0][0]) if points else 0.0
    n_params = len(model.terms)
    if (
        len(points) < FIT_MIN_POINTS
        or decades < FIT_MIN_DECADES
        or len(points) <= n_params
    ):
        raise UnderdeterminedFitError(len(points), n_params, decades)

    x = np.array([c for c, _ in points], dtype=float)
    y = np.array([v for _, v in points])
    basis = model.basis(x)
    scale = np.log(x) ** max(e for _, e in model.terms)
    if model.x_factor:
        scale = scale / x
    coefficients, *_ = np.linalg.lstsq(basis * scale[:, None], y * scale, rcond=None)
    residuals = y - basis @ coefficients
    return FitReport(
        kind=str(series.kind),
        model=model,
        checkpoints=[c for c, _ in points],
        coefficients=coefficients.tolist(),
        residuals=residuals.tolist(),
    )
