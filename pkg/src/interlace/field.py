"""Three-dimensional vector fields with rational-expression components.

Provides substitution of formal curves into field components, the formal
invariance test  xi o C = h * C'  with series multiplier h, reduction to the
planar nonautonomous system in the x-chart (f1 = xi_y/xi_x, f2 = xi_z/xi_x
with y, z renamed y1, y2), and the associated difference system in
(x, y1, y2, z1, z2) whose z-part tracks the gap between two solutions
without catastrophic cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import expr as _expr
from . import series as _series
from .curve import FormalCurve
from .errors import (
    ConstantCurveError,
    NonAdaptedChartError,
    NonUnitDivisorError,
    OrderExceededError,
)

FIELD_VARS = ("x", "y", "z")
REDUCED_VARS = ("x", "y1", "y2")
DIFFERENCE_VARS = ("x", "y1", "y2", "z1", "z2")


def parse_field_expr(text, variables=FIELD_VARS):
    """Parse one rational field component; E(..)/exp(..) are not field material."""
    return _expr.parse_expr(text, variables, allow_calls=False)


def evaluate(e, point):
    return _expr.evaluate(e, point)


def substitute_series(e, curve_env):
    return _expr.substitute_series(e, curve_env)


@dataclass(frozen=True)
class VectorField3:
    """xi = xi_x d/dx + xi_y d/dy + xi_z d/dz over variables (x, y, z)."""

    name: str
    xi_x: object
    xi_y: object
    xi_z: object

    @staticmethod
    def from_text(name, fx, fy, fz):
        return VectorField3(
            name,
            parse_field_expr(fx),
            parse_field_expr(fy),
            parse_field_expr(fz),
        )

    @property
    def components(self):
        return (self.xi_x, self.xi_y, self.xi_z)

    def component_texts(self):
        return tuple(_expr.to_text(c) for c in self.components)


@dataclass(frozen=True)
class ReducedSystem:
    """y1' = f1(x, y1, y2), y2' = f2(x, y1, y2)."""

    f1: object
    f2: object
    provenance: str = "direct"

    @staticmethod
    def from_text(f1, f2, provenance="direct"):
        return ReducedSystem(
            _expr.parse_expr(f1, REDUCED_VARS),
            _expr.parse_expr(f2, REDUCED_VARS),
            provenance,
        )

    def component_texts(self):
        return (_expr.to_text(self.f1), _expr.to_text(self.f2))

    def rhs(self, x, y):
        env = {"x": x, "y1": y[0], "y2": y[1]}
        return (_expr.evaluate(self.f1, env), _expr.evaluate(self.f2, env))

    @property
    def dimension(self):
        return 2


@dataclass(frozen=True)
class DifferenceSystem:
    """The four-equation system for (y, z) = (one solution, gap to another).

    The gap equations are literal differences f_i(x, y+z) - f_i(x, y), which
    cancel catastrophically in float64 once ||z|| drops ~16 orders below the
    solution scale (flat gaps do).  ``rhs`` switches those two components to
    big-float evaluation with precision scaled to the gap ratio, keeping the
    gap's relative accuracy tolerance-limited at any size.
    """

    f1: object
    f2: object
    f3: object
    f4: object
    provenance: str = "direct"

    CANCELLATION_RATIO = 1e-6

    def component_texts(self):
        return tuple(_expr.to_text(f) for f in (self.f1, self.f2, self.f3, self.f4))

    def rhs(self, x, y):
        env = {"x": x, "y1": y[0], "y2": y[1], "z1": y[2], "z2": y[3]}
        v1 = _expr.evaluate(self.f1, env)
        v2 = _expr.evaluate(self.f2, env)
        zmag = max(abs(y[2]), abs(y[3]))
        ymag = max(abs(y[0]), abs(y[1]), abs(x), 1e-300)
        if zmag == 0.0:
            return (v1, v2, 0.0, 0.0)
        if zmag < self.CANCELLATION_RATIO * ymag:
            prec = 80 + int(3.4 * max(0.0, math.log10(ymag / zmag)))
            v3 = float(_expr.evaluate_mp(self.f3, env, prec))
            v4 = float(_expr.evaluate_mp(self.f4, env, prec))
        else:
            v3 = _expr.evaluate(self.f3, env)
            v4 = _expr.evaluate(self.f4, env)
        return (v1, v2, v3, v4)

    @property
    def dimension(self):
        return 4


def chart_reduce(v: VectorField3) -> ReducedSystem:
    """Quotient by the x-component: f1 = xi_y/xi_x, f2 = xi_z/xi_x (y->y1, z->y2)."""
    if _expr.is_zero_expr(v.xi_x):
        raise NonAdaptedChartError(
            f"field {v.name!r} has identically zero x-component; the x-chart is not adapted"
        )
    renaming = {"y": "y1", "z": "y2"}
    den = _expr.rename_vars(v.xi_x, renaming)
    f1 = _expr.BinOp("/", _expr.rename_vars(v.xi_y, renaming), den)
    f2 = _expr.BinOp("/", _expr.rename_vars(v.xi_z, renaming), den)
    return ReducedSystem(f1, f2, provenance=v.name)


def difference_system(r: ReducedSystem) -> DifferenceSystem:
    """Append z1' = f1(x, y+z) - f1(x, y) and likewise z2'; exact at z = 0."""
    shifted = {
        "y1": _expr.BinOp("+", _expr.Var("y1"), _expr.Var("z1")),
        "y2": _expr.BinOp("+", _expr.Var("y2"), _expr.Var("z2")),
    }
    f3 = _expr.BinOp("-", _expr.rename_vars(r.f1, shifted), r.f1)
    f4 = _expr.BinOp("-", _expr.rename_vars(r.f2, shifted), r.f2)
    return DifferenceSystem(r.f1, r.f2, f3, f4, provenance=r.provenance)


@dataclass(frozen=True)
class InvarianceReport:
    """Result of the multiplier test xi o C = h * C'.

    ``residuals`` are xi_j(C) - h * C_j' per component, checked through
    t^checked_order.  In float mode ``max_residual`` is compared against
    ``tolerance`` after dividing by ``scale`` (the largest coefficient
    magnitude among the compared quantities); exact mode demands literal
    zero coefficients.
    """

    invariant: bool
    multiplier: object  # TruncatedSeries or None
    residuals: tuple
    checked_order: int
    pivot_index: int
    max_residual: float = 0.0
    scale: float = 1.0
    tolerance: float = 0.0

    def residual_val(self):
        vals = [r.val() for r in self.residuals]
        return min(vals)


def invariance_check(v: VectorField3, c: FormalCurve, order: int, tolerance=1e-30):
    """Check xi o C = h C' through t^order; curve orders must exceed ``order``.

    The multiplier is extracted from the component whose derivative has the
    smallest valuation (lowest index on ties); when xi_pivot(C) is not
    divisible by that derivative, no series multiplier exists and the
    parallelism defects  xi_j(C) * C_pivot' - xi_pivot(C) * C_j'  are
    reported as residuals instead.
    """
    comps = c.effective_components()
    if len(comps) != 3:
        raise ValueError("invariance_check needs a three-component curve")
    if min(s.order for s in comps) < order + 1:
        raise OrderExceededError(
            f"invariance at order {order} needs component orders >= {order + 1}"
        )
    return _invariance(v, comps, order, tolerance)


def _invariance(v, comps, order, tolerance):
    derivs = [_series.derive(s) for s in comps]
    vals = [d.val() for d in derivs]
    if all(val == _series.INF for val in vals):
        raise ConstantCurveError("every curve component derivative vanishes")
    pivot = min(range(len(comps)), key=lambda i: (vals[i], i))
    env = {"x": comps[0], "y": comps[1], "z": comps[2]}
    images = [_expr.substitute_series(comp, env) for comp in v.components]

    vpiv = vals[pivot]
    mode = comps[0].mode
    try:
        h = _series.shift_divide(images[pivot], derivs[pivot])
        residuals = tuple(
            (images[j].truncated(h.order) - h * derivs[j]) for j in range(len(comps))
        )
    except NonUnitDivisorError:
        # xi_pivot(C) has a lower valuation than C_pivot': no series h exists
        h = None
        residuals = tuple(
            images[j] * derivs[pivot] - images[pivot] * derivs[j]
            for j in range(len(comps))
        )
    checked = min(r.order for r in residuals)
    checked = min(checked, order - vpiv if h is not None else order)
    residuals = tuple(r.truncated(checked) for r in residuals)

    if mode.exact:
        invariant = h is not None and all(r.is_zero() for r in residuals)
        max_res, scale = _residual_scale(residuals, images, derivs, h)
        tol = 0.0
    else:
        max_res, scale = _residual_scale(residuals, images, derivs, h)
        invariant = h is not None and max_res <= tolerance * scale
        tol = tolerance
    return InvarianceReport(
        invariant=invariant,
        multiplier=h,
        residuals=residuals,
        checked_order=checked,
        pivot_index=pivot,
        max_residual=max_res,
        scale=scale,
        tolerance=tol,
    )


def _residual_scale(residuals, images, derivs, h):
    def mags(series_list):
        out = 0.0
        for s in series_list:
            for coeff in s.coeffs:
                out = max(out, abs(float(coeff)))
        return out

    max_res = mags(residuals)
    compared = list(images)
    if h is not None:
        compared.extend(h * d for d in derivs)
    scale = max(mags(compared), 1.0)
    return max_res, scale
