"""Minimal graphs over the right half-plane from Weierstrass data.

A solution u > 0 of the minimal surface equation over a domain bounded by
an unbounded arc, with u = 0 on the boundary, is carried here in parametric
form: a univalent harmonic map

    f(zeta) = h(zeta) + conj(g(zeta)),   zeta = sigma + i*tau in H,

whose analytic part h determines everything else.  The height is forced to
be linear in sigma,

    u = k0 * sigma        (k0 > 0),

and the companion function is coupled to h through

    g'(zeta) = -k / h'(zeta),      k = k0**2 / 4,

so a pair (h, k0) fixes the whole surface up to a translation of the image
domain.  Valid data satisfies |h'| >= sqrt(k) with |h'| > |g'| (the map is
sense-preserving); the Jacobian |h'|**2 - k**2/|h'|**2 quantifies the
univalence margin and vanishes exactly where the data degenerates.

WeierstrassPair instances are immutable; all operations are pure functions
and safe to evaluate concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad

from .analytic import AffineMap, AnalyticMap, PowerAffineMap, ScaledMap, DERIVATIVE_FLOOR
from .errors import DomainError, ParameterError, QuadratureError, SingularityError

#: Probe points used to sanity-check a closed-form g against g' = -k/h'.
_DILATATION_PROBES = (0.5 + 0.0j, 1.0 + 1.0j, 2.0 - 1.5j, 0.25 + 3.0j, 4.0 + 0.5j)


@dataclass(frozen=True)
class SurfacePoint:
    """One point of the graph: domain coordinates (x, y) and the height u >= 0."""

    x: float
    y: float
    u: float


@dataclass(frozen=True)
class WeierstrassPair:
    """Analytic map h plus the height slope k0 (and an evaluation path for g).

    Exactly one of ``g`` (closed form) or ``g_anchor`` (a point zeta_a with the
    value g(zeta_a), from which g is continued by segment quadrature of
    -k/h') must be provided.  ``k`` is stored redundantly and must equal
    k0**2/4 exactly; pass None to have it derived.
    """

    h: AnalyticMap
    k0: float
    g: AnalyticMap | None = None
    g_anchor: tuple[complex, complex] | None = None
    k: float | None = None
    gamma: float | None = None
    degenerate: bool = False
    label: str = "pair"
    quad_tol: float = 1e-10

    def __post_init__(self):
        if not (np.isfinite(self.k0) and self.k0 > 0.0):
            raise ParameterError(f"k0 must be positive, got {self.k0}")
        derived = self.k0 * self.k0 / 4.0
        if self.k is None:
            object.__setattr__(self, "k", derived)
        elif self.k != derived:
            raise ParameterError(f"k = {self.k} does not equal k0**2/4 = {derived}")
        if (self.g is None) == (self.g_anchor is None):
            raise ParameterError("exactly one of g (closed form) or g_anchor is required")
        if self.g_anchor is not None and complex(self.g_anchor[0]).real < 0.0:
            raise ParameterError("g anchor must lie in the closed half-plane")
        if self.g is not None and not self.degenerate:
            self._probe_dilatation()

    def _probe_dilatation(self) -> None:
        # g' * h' must equal -k identically; a handful of probes catches
        # mis-specified closed forms at construction time.
        for zeta in _DILATATION_PROBES:
            try:
                hp = self.h.jet(zeta).d1
                gp = self.g.jet(zeta).d1
            except DomainError:
                continue
            if abs(gp * hp + self.k) > 1e-8 * max(self.k, 1.0):
                raise ParameterError(
                    f"closed-form g violates g'h' = -k at zeta={zeta}: got {gp * hp}"
                )

    def hprime(self, zeta):
        return self.h.jet(zeta).d1


def g_prime(pair: WeierstrassPair, zeta, floor: float = DERIVATIVE_FLOOR):
    """g'(zeta) = -k/h'(zeta), exact wherever h' is above the derivative floor."""
    hp = pair.h.jet(zeta).d1
    if not np.all(np.abs(hp) > floor):
        raise SingularityError("|h'| at derivative floor: representation degenerates")
    return -pair.k / hp


def _segment_quad(fn, z0: complex, z1: complex, tol: float) -> complex:
    """Integrate a complex integrand along the straight segment [z0, z1]."""
    dz = z1 - z0
    if dz == 0:
        return 0.0 + 0.0j

    def real_part(t: float) -> float:
        return (fn(z0 + t * dz) * dz).real

    def imag_part(t: float) -> float:
        return (fn(z0 + t * dz) * dz).imag

    re, re_err = quad(real_part, 0.0, 1.0, epsabs=tol / 4, epsrel=tol / 4, limit=200)
    im, im_err = quad(imag_part, 0.0, 1.0, epsabs=tol / 4, epsrel=tol / 4, limit=200)
    if re_err + im_err > tol:
        raise QuadratureError(
            f"segment quadrature error {re_err + im_err:.3e} above tolerance {tol:.3e}"
        )
    return complex(re, im)


def g_value(pair: WeierstrassPair, zeta):
    """g(zeta), from the closed form or by quadrature of -k/h' from the anchor.

    The anchored integral runs along the straight segment from zeta_a, which
    stays inside the (convex) closed half-plane, so the value is
    path-independent.
    """
    if pair.g is not None:
        return pair.g.jet(zeta).v
    zeta_a, value_a = pair.g_anchor

    def integrand(xi: complex) -> complex:
        return -pair.k / pair.h.jet(xi).d1

    arr = np.asarray(zeta, dtype=complex)
    if arr.ndim == 0:
        return value_a + _segment_quad(integrand, complex(zeta_a), complex(arr[()]), pair.quad_tol)
    flat = np.array(
        [value_a + _segment_quad(integrand, complex(zeta_a), complex(z), pair.quad_tol)
         for z in arr.ravel()]
    )
    return flat.reshape(arr.shape)


def eval_surface(pair: WeierstrassPair, zeta) -> SurfacePoint:
    """Map zeta in the closed half-plane to (x, y, u) on the graph.

    (x, y) = f(zeta) = h(zeta) + conj(g(zeta)) and u = k0 * Re(zeta); at
    sigma = 0 this lands on the boundary curve, where u vanishes exactly.
    """
    zeta = np.asarray(zeta, dtype=complex)[()]
    if not np.all(zeta.real >= 0.0):
        raise DomainError("eval_surface requires sigma >= 0")
    f = pair.h.jet(zeta).v + np.conj(g_value(pair, zeta))
    return SurfacePoint(x=f.real, y=f.imag, u=pair.k0 * zeta.real)


def height_via_integral(pair: WeierstrassPair, zeta: complex) -> float:
    """Height recovered as 2*Re[i * integral of sqrt(h'g')] from the boundary.

    Integrates from the boundary foot i*tau to zeta along a horizontal
    segment.  Of the two square roots of h'g', the one with nonpositive
    imaginary part is the branch that keeps the height positive in H (for
    valid data sqrt(h'g') == -i*k0/2 identically); the result must equal
    k0*sigma.
    """
    zeta = complex(zeta)
    if zeta.real < 0.0:
        raise DomainError("height_via_integral requires sigma >= 0")
    z0 = complex(0.0, zeta.imag)

    def integrand(xi: complex) -> complex:
        w = pair.h.jet(xi).d1 * g_prime(pair, xi)
        return -1j * np.sqrt(-w)  # root with Im <= 0

    integral = _segment_quad(integrand, z0, zeta, pair.quad_tol)
    return float(2.0 * (1j * integral).real)


def jacobian_det(pair: WeierstrassPair, zeta, floor: float = DERIVATIVE_FLOOR):
    """Univalence margin |h'|**2 - k**2/|h'|**2; positive for valid data."""
    hp = pair.h.jet(zeta).d1
    mag2 = np.abs(hp) ** 2
    if not np.all(mag2 > floor):
        raise SingularityError("|h'| at derivative floor")
    return mag2 - pair.k**2 / mag2


def lw_family(gamma: float, allow_endpoint: bool = False) -> WeierstrassPair:
    """The one-parameter catalog family with concave domains.

    h(zeta) = (zeta+1)**gamma and g(zeta) = -(zeta+1)**(2-gamma)/(gamma*(2-gamma))
    with k0 = 2 (so k = 1), defined for 1 < gamma < 2.  The closure endpoints
    are admitted only with ``allow_endpoint`` and come back flagged
    degenerate: at gamma = 1 the dilatation loses strict inequality, and at
    gamma = 2 the closed form for g gives way to an anchored quadrature.
    """
    if not np.isfinite(gamma):
        raise ParameterError("gamma must be finite")
    inside = 1.0 < gamma < 2.0
    if not inside and not (allow_endpoint and 1.0 <= gamma <= 2.0):
        raise ParameterError(f"gamma = {gamma} outside (1, 2)")
    h = PowerAffineMap(offset=1.0, exponent=float(gamma))
    if gamma == 2.0:
        # coefficient 1/(gamma*(2-gamma)) blows up; continue g from g(0) = 0
        return WeierstrassPair(
            h=h, k0=2.0, g_anchor=(0.0 + 0.0j, 0.0 + 0.0j),
            gamma=float(gamma), degenerate=True, label=f"lw(gamma={gamma:g})",
        )
    g = PowerAffineMap(
        offset=1.0, exponent=float(2.0 - gamma), coeff=-1.0 / (gamma * (2.0 - gamma))
    )
    return WeierstrassPair(
        h=h, k0=2.0, g=g, gamma=float(gamma), degenerate=not inside,
        label=f"lw(gamma={gamma:g})",
    )


def planar_pair(a: float, k0: float = 2.0) -> WeierstrassPair:
    """The planar solution: h = a*zeta, g = -(k/a)*zeta, a linear graph with
    straight level lines (curvature identically zero)."""
    k = k0 * k0 / 4.0
    if not (np.isfinite(a) and a > np.sqrt(k)):
        raise ParameterError(f"planar pair needs a > sqrt(k) = {np.sqrt(k):g}, got {a}")
    return WeierstrassPair(
        h=AffineMap(complex(a)), k0=float(k0), g=AffineMap(complex(-k / a)),
        label=f"planar(a={a:g}, k0={k0:g})",
    )


def scale_solution(pair: WeierstrassPair, c: float) -> WeierstrassPair:
    """Rescale the solution: u(x, y) -> c*u(x/c, y/c).

    In parametric data this is h -> c*h and k0 -> c*k0 (hence k -> c**2*k and
    g' -> c*g' automatically); the same zeta then maps to the spatially
    scaled point with height c*u.
    """
    if not (np.isfinite(c) and c > 0.0):
        raise ParameterError(f"scale factor must be positive, got {c}")
    if c == 1.0:
        return pair
    scaled_g = None if pair.g is None else ScaledMap(float(c), pair.g)
    scaled_anchor = None
    if pair.g_anchor is not None:
        zeta_a, value_a = pair.g_anchor
        scaled_anchor = (zeta_a, c * value_a)
    return replace(
        pair, h=ScaledMap(float(c), pair.h), k0=c * pair.k0, k=None,
        g=scaled_g, g_anchor=scaled_anchor, label=f"scale({c:g})*{pair.label}",
    )
