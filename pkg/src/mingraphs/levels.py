"""Level curves of the height function and their curvature.

Because the height is u = k0*sigma, the locus u = C is the image of the
vertical line sigma_0 = C/k0 under f = h + conj(g), parametrized by tau.
With g' = -k/h' the tau-partials of that parametrization are

    x_tau    = -Im(h' - k/h')          x_tautau = -Re(h'' + k h''/h'^2)
    y_tau    =  Re(h' + k/h')          y_tautau = -Im(h'' - k h''/h'^2)

and plugging them into the generic turning-rate formula

    kappa = (x_tau*y_tautau - y_tau*x_tautau) / (x_tau^2 + y_tau^2)^{3/2}

collapses to the closed form

    kappa  = |h'|/(|h'|^2 + k) * Re(h''/h').

The companion quantity kappa1 = Re(h''/h')/|h'| is the curvature of the
image of the same vertical line under h alone; the two share the factor
Re(h''/h'), so kappa = |h'|^2/(|h'|^2+k) * kappa1.

Curves are traversed with increasing tau.  With the partials above this
orientation makes kappa positive exactly when the curve bends away from
the region u > C; the sign is verified against that geometric definition
in the test suite rather than assumed.

A finite-difference oracle (central differences of tau -> (x, y) through
the surface evaluator, then the generic formula) provides an independent
check of the closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .analytic import log_derivative
from .errors import ConvergenceError, ParameterError, SingularityError
from .serialize import fmt_float, to_json
from .weierstrass import WeierstrassPair, eval_surface

#: Column order for CSV/JSON export of sampled curves (fixed, do not reorder).
SAMPLE_COLUMNS = (
    "tau", "x", "y", "x_tau", "y_tau", "x_tautau", "y_tautau",
    "phi", "s", "kappa", "kappa1",
)


@dataclass(frozen=True)
class LevelCurveSpec:
    """Sampling request for one level u = c (c = 0 is the boundary curve)."""

    c: float
    tau_min: float = -20.0
    tau_max: float = 20.0
    n_samples: int = 401
    fd_step: float = 1e-4

    def __post_init__(self):
        if self.c < 0.0 or not np.isfinite(self.c):
            raise ParameterError(f"level must be >= 0, got {self.c}")
        if not self.tau_min < self.tau_max:
            raise ParameterError("tau_min must be below tau_max")
        if self.n_samples < 2:
            raise ParameterError("need at least 2 samples")
        if self.fd_step <= 0.0:
            raise ParameterError("fd_step must be positive")

    def taus(self) -> np.ndarray:
        return np.linspace(self.tau_min, self.tau_max, self.n_samples)


@dataclass(frozen=True)
class LevelCurveSample:
    """One fully populated point of a sampled level curve."""

    tau: float
    x: float
    y: float
    x_tau: float
    y_tau: float
    x_tautau: float
    y_tautau: float
    phi: float
    s: float
    kappa: float
    kappa1: float


@dataclass(frozen=True)
class BoundaryTrace:
    """Boundary curve samples plus the concavity preconditions they exhibit."""

    samples: list[LevelCurveSample]
    y_tau_nonnegative: bool
    kappa_nonnegative: bool


def sigma_for_level(pair: WeierstrassPair, c: float) -> float:
    """The vertical line sigma_0 = c/k0 carrying the level u = c."""
    if c < 0.0:
        raise ParameterError(f"level must be >= 0, got {c}")
    return c / pair.k0


def tau_partials(pair: WeierstrassPair, zeta):
    """(x_tau, y_tau, x_tautau, y_tautau) of the level parametrization at zeta."""
    jet = pair.h.jet(zeta)
    ratio = log_derivative(jet)  # h''/h', also enforces the derivative floor
    hp = jet.d1
    hpp = jet.d2
    k = pair.k
    x_tau = -np.imag(hp - k / hp)
    y_tau = np.real(hp + k / hp)
    x_tautau = -np.real(hpp + k * ratio / hp)
    y_tautau = -np.imag(hpp - k * ratio / hp)
    return x_tau, y_tau, x_tautau, y_tautau


def tau_partials_conjugate_form(pair: WeierstrassPair, zeta):
    """Equivalent first partials (|h'|^2+k)*(-Im, Re) of 1/conj(h'), for cross-checks."""
    hp = pair.h.jet(zeta).d1
    inv_conj = 1.0 / np.conj(hp)
    weight = np.abs(hp) ** 2 + pair.k
    return -weight * np.imag(inv_conj), weight * np.real(inv_conj)


def curvature_generic(x_tau, y_tau, x_tautau, y_tautau):
    """Turning rate d(phi)/ds from first and second parameter derivatives."""
    speed_sq = x_tau * x_tau + y_tau * y_tau
    if not np.all(speed_sq > 1e-300):
        raise SingularityError("degenerate tangent: x_tau^2 + y_tau^2 underflows")
    return (x_tau * y_tautau - y_tau * x_tautau) / speed_sq**1.5


def curvature_closed_form(pair: WeierstrassPair, zeta):
    """kappa = |h'|/(|h'|^2+k) * Re(h''/h') at zeta (sign: positive bending away
    from the set u > C)."""
    jet = pair.h.jet(zeta)
    ratio = log_derivative(jet)
    mag = np.abs(jet.d1)
    return mag / (mag * mag + pair.k) * np.real(ratio)


def curvature_h_image(pair: WeierstrassPair, zeta):
    """Curvature of the image of the vertical line under h alone: Re(h''/h')/|h'|."""
    jet = pair.h.jet(zeta)
    ratio = log_derivative(jet)
    return np.real(ratio) / np.abs(jet.d1)


def curvature_fd_oracle(
    pair: WeierstrassPair,
    sigma0: float,
    tau: float,
    step: float = 1e-4,
    tol: float | None = None,
) -> float:
    """Independent curvature estimate from central differences of the surface map.

    Evaluates tau -> (x, y) at five stations tau + {-2, -1, 0, 1, 2}*step,
    forms second-order central first/second differences, and applies the
    generic curvature formula.  The same stations also yield the double-step
    estimate; the Richardson gap |kappa(step) - kappa(2*step)|/3 serves as a
    truncation-error estimate and trips ConvergenceError when ``tol`` is set
    and exceeded.
    """
    if step <= 0.0:
        raise ParameterError("step must be positive")
    if sigma0 < 0.0:
        raise ParameterError("sigma0 must be >= 0")
    offsets = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) * step
    pts = [eval_surface(pair, complex(sigma0, tau + d)) for d in offsets]
    x = np.array([p.x for p in pts])
    y = np.array([p.y for p in pts])

    def estimate(idx_lo: int, idx_hi: int, h: float) -> float:
        xt = (x[idx_hi] - x[idx_lo]) / (2.0 * h)
        yt = (y[idx_hi] - y[idx_lo]) / (2.0 * h)
        xtt = (x[idx_hi] - 2.0 * x[2] + x[idx_lo]) / h**2
        ytt = (y[idx_hi] - 2.0 * y[2] + y[idx_lo]) / h**2
        return float(curvature_generic(xt, yt, xtt, ytt))

    kappa = estimate(1, 3, step)
    kappa_double = estimate(0, 4, 2.0 * step)
    err_est = abs(kappa - kappa_double) / 3.0
    if tol is not None and err_est > tol:
        raise ConvergenceError(
            f"FD oracle truncation estimate {err_est:.3e} above tolerance {tol:.3e}; "
            "reduce the step"
        )
    return kappa


def sample_level_curve(pair: WeierstrassPair, spec: LevelCurveSpec) -> list[LevelCurveSample]:
    """Sample the level u = spec.c at n uniformly spaced tau values.

    Arc length s accumulates by the trapezoid rule on the analytic speed
    sqrt(x_tau^2 + y_tau^2) (O(dtau^2), diagnostic rather than load-bearing).
    """
    sigma0 = sigma_for_level(pair, spec.c)
    taus = spec.taus()
    zetas = sigma0 + 1j * taus
    pts = eval_surface(pair, zetas)
    x_tau, y_tau, x_tautau, y_tautau = tau_partials(pair, zetas)
    kappa = curvature_generic(x_tau, y_tau, x_tautau, y_tautau)
    kappa_closed = curvature_closed_form(pair, zetas)
    kappa1 = curvature_h_image(pair, zetas)
    phi = np.arctan2(y_tau, x_tau)
    speed = np.sqrt(x_tau**2 + y_tau**2)
    ds = 0.5 * (speed[1:] + speed[:-1]) * np.diff(taus)
    s = np.concatenate([[0.0], np.cumsum(ds)])
    # closed form is the stored kappa; the generic route must agree and acts
    # as a free consistency check on every sample
    if not np.allclose(kappa, kappa_closed, rtol=0.0, atol=1e-9 * (1.0 + np.abs(kappa_closed).max())):
        raise SingularityError("curvature routes disagree; data likely degenerate")
    x = np.broadcast_to(np.asarray(pts.x), taus.shape)
    y = np.broadcast_to(np.asarray(pts.y), taus.shape)
    return [
        LevelCurveSample(
            tau=float(taus[i]), x=float(x[i]), y=float(y[i]),
            x_tau=float(x_tau[i]), y_tau=float(y_tau[i]),
            x_tautau=float(x_tautau[i]), y_tautau=float(y_tautau[i]),
            phi=float(phi[i]), s=float(s[i]),
            kappa=float(kappa_closed[i]), kappa1=float(kappa1[i]),
        )
        for i in range(len(taus))
    ]


def boundary_trace(pair: WeierstrassPair, spec: LevelCurveSpec) -> BoundaryTrace:
    """Trace the boundary curve f(i*tau) (level c = 0) and report whether
    y_tau >= 0 and kappa >= 0 hold throughout -- the two geometric
    preconditions of concavity propagation."""
    if spec.c != 0.0:
        raise ParameterError("boundary_trace requires a spec with c = 0")
    samples = sample_level_curve(pair, spec)
    y_tau_ok = all(sample.y_tau >= 0.0 for sample in samples)
    kappa_ok = all(sample.kappa >= 0.0 for sample in samples)
    return BoundaryTrace(samples=samples, y_tau_nonnegative=y_tau_ok, kappa_nonnegative=kappa_ok)


def samples_to_csv(samples: list[LevelCurveSample]) -> str:
    """CSV text with the fixed column schema, 17-significant-digit floats."""
    lines = [",".join(SAMPLE_COLUMNS)]
    for sample in samples:
        lines.append(",".join(fmt_float(getattr(sample, name)) for name in SAMPLE_COLUMNS))
    return "\n".join(lines) + "\n"


def samples_to_json(samples: list[LevelCurveSample]) -> str:
    """JSON array of sample records, keys in the fixed column order."""
    records = [
        {name: float(getattr(sample, name)) for name in SAMPLE_COLUMNS}
        for sample in samples
    ]
    return to_json(records) + "\n"


# the dataclass must expose exactly the exported columns (schema lock)
assert {f.name for f in fields(LevelCurveSample)} == set(SAMPLE_COLUMNS)
