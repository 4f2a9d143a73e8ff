"""Pull the height back to a Euclidean grid and check it as a PDE solution.

The parametric data gives u only along the map f; to test the divergence
form of the minimal surface equation,

    div( grad(u) / sqrt(1 + |grad(u)|^2) ) = 0,

u must be a genuine function of (x, y).  Each grid node is inverted through
f by a Newton iteration whose exact 2x2 Jacobian comes from h' and
g' = -k/h' (Wirtinger derivatives f_zeta = h', f_zetabar = conj(g')), so an
update solves a*d + b*conj(d) = -r with a = h', b = conj(g').  Univalence
(|h'| > |g'|) keeps the Jacobian determinant positive, so a converged
iterate is the preimage.  Seeds come from a coarse forward-evaluated cloud
and then march column to column; within a column, rows that lost their
neighbor seed are repaired from adjacent rows.

Stencil conventions (all centered, second order):
  * a node is *interior* iff its full 3x3 neighborhood is masked-in;
    boundary-adjacent values exist but never enter residual statistics;
  * the PDE residual is conservative: fluxes grad(u)/W on the four cell
    faces, differenced back to the node (exactly zero for linear u);
  * the graph-form level-set curvature is F/|grad u|^3 with
    F = uy^2*uxx + ux^2*uyy - 2*ux*uy*uxy, masked where |grad u| < 1e-8
    (the formula is singular at critical points and mask fringes can
    produce near-zeros).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial import cKDTree

from .errors import ConvergenceError, EmptyInteriorError, ParameterError
from .serialize import fmt_float
from .verify import VerificationReport
from .weierstrass import WeierstrassPair, g_value

Window = tuple[tuple[float, float], tuple[float, float]]


@dataclass(frozen=True)
class ReconstructionStats:
    attempted: int
    solved: int
    failed: int
    seed_placed: bool


@dataclass(frozen=True, eq=False)
class ScalarField2D:
    """Masked rectangular grid of nodal values over the (x, y) plane.

    ``values`` and ``mask`` have shape (ny, nx); row j sits at
    y = origin[1] + j*spacing, column i at x = origin[0] + i*spacing.
    Masked-in nodes always carry finite values.
    """

    origin: tuple[float, float]
    spacing: float
    nx: int
    ny: int
    values: np.ndarray
    mask: np.ndarray
    stats: ReconstructionStats | None = None

    def __post_init__(self):
        if self.spacing <= 0.0:
            raise ParameterError("spacing must be positive")
        if self.values.shape != (self.ny, self.nx) or self.mask.shape != (self.ny, self.nx):
            raise ParameterError("values/mask shape must be (ny, nx)")
        if not np.all(np.isfinite(self.values[self.mask])):
            raise ParameterError("masked-in nodes must carry finite values")

    def xs(self) -> np.ndarray:
        return self.origin[0] + self.spacing * np.arange(self.nx)

    def ys(self) -> np.ndarray:
        return self.origin[1] + self.spacing * np.arange(self.ny)

    def node_xy(self, j: int, i: int) -> tuple[float, float]:
        return (self.origin[0] + self.spacing * i, self.origin[1] + self.spacing * j)

    def interior_mask(self) -> np.ndarray:
        """Nodes whose full 3x3 stencil is masked-in."""
        m = self.mask
        out = np.zeros_like(m)
        out[1:-1, 1:-1] = (
            m[1:-1, 1:-1]
            & m[:-2, 1:-1] & m[2:, 1:-1] & m[1:-1, :-2] & m[1:-1, 2:]
            & m[:-2, :-2] & m[:-2, 2:] & m[2:, :-2] & m[2:, 2:]
        )
        return out

    @classmethod
    def from_function(cls, fn, window: Window, spacing: float) -> "ScalarField2D":
        """Synthetic field: evaluate fn(x, y) on the full grid (all masked-in)."""
        xs, ys = _axis(window[0], spacing), _axis(window[1], spacing)
        values = np.asarray(fn(xs[None, :], ys[:, None]), dtype=float)
        values = np.broadcast_to(values, (len(ys), len(xs))).copy()
        return cls(
            origin=(float(xs[0]), float(ys[0])), spacing=float(spacing),
            nx=len(xs), ny=len(ys), values=values,
            mask=np.ones((len(ys), len(xs)), dtype=bool),
        )

    def to_grid_text(self) -> str:
        header = (
            f"{fmt_float(self.origin[0])} {fmt_float(self.origin[1])} "
            f"{fmt_float(self.spacing)} {self.nx} {self.ny}"
        )
        rows = []
        for j in range(self.ny):
            rows.append(" ".join(
                fmt_float(self.values[j, i]) if self.mask[j, i] else "nan"
                for i in range(self.nx)
            ))
        return header + "\n" + "\n".join(rows) + "\n"

    @classmethod
    def from_grid_text(cls, text: str) -> "ScalarField2D":
        lines = [line for line in text.strip().split("\n") if line.strip()]
        x0, y0, h, nx, ny = lines[0].split()
        nx, ny = int(nx), int(ny)
        values = np.array([[float(v) for v in line.split()] for line in lines[1:ny + 1]])
        if values.shape != (ny, nx):
            raise ParameterError("grid body does not match header dimensions")
        mask = np.isfinite(values)
        return cls(origin=(float(x0), float(y0)), spacing=float(h),
                   nx=nx, ny=ny, values=values, mask=mask)

    def to_csv(self) -> str:
        lines = ["x,y,u,mask"]
        xs, ys = self.xs(), self.ys()
        for j in range(self.ny):
            for i in range(self.nx):
                u = fmt_float(self.values[j, i]) if self.mask[j, i] else "nan"
                lines.append(f"{fmt_float(xs[i])},{fmt_float(ys[j])},{u},{int(self.mask[j, i])}")
        return "\n".join(lines) + "\n"


@dataclass
class ResidualReport:
    """Residual statistics over interior nodes at one grid spacing."""

    spacing: float
    max_abs_residual: float
    l2_residual: float
    node_count: int
    convergence_order: float | None = None

    def to_dict(self) -> dict:
        return {
            "spacing": self.spacing,
            "max_abs_residual": self.max_abs_residual,
            "l2_residual": self.l2_residual,
            "node_count": self.node_count,
            "convergence_order": self.convergence_order,
        }


def _axis(rng: tuple[float, float], spacing: float) -> np.ndarray:
    lo, hi = rng
    if hi <= lo:
        raise ParameterError("window range must be increasing")
    n = int(round((hi - lo) / spacing)) + 1
    return lo + spacing * np.arange(n)


def _f_values(pair: WeierstrassPair, zetas: np.ndarray) -> np.ndarray:
    return pair.h.jet(zetas).v + np.conj(g_value(pair, zetas))


def _newton_batch(pair, targets, guesses, tol: float, max_iter: int):
    """Vectorized Newton inversion of f over the closed half-plane.

    Iterates are projected to sigma >= 0 (the search domain); rows whose
    update degenerates are frozen as failed.  Returns (zeta, ok).
    """
    t = np.asarray(targets, dtype=complex)
    z = np.array(guesses, dtype=complex)
    z = np.where(np.isfinite(z), z, 1.0 + 0.0j)
    z = np.maximum(z.real, 0.0) + 1j * z.imag
    scale = 1.0 + np.abs(t)
    ok = np.zeros(t.shape, dtype=bool)
    alive = np.ones(t.shape, dtype=bool)
    k = pair.k
    for _ in range(max_iter):
        if not alive.any():
            break
        za = z[alive]
        jet = pair.h.jet(za)
        r = jet.v + np.conj(g_value(pair, za)) - t[alive]
        conv = np.abs(r) <= tol * scale[alive]
        if conv.any():
            idx = np.flatnonzero(alive)[conv]
            ok[idx] = True
            alive[idx] = False
            keep = ~conv
            if not keep.any():
                continue
            za, r = za[keep], r[keep]
            jet_d1 = jet.d1[keep] if np.ndim(jet.d1) else jet.d1
        else:
            jet_d1 = jet.d1
        a = jet_d1
        b = -k / np.conj(a)  # conj(g') with g' = -k/h'
        denom = np.abs(a) ** 2 - np.abs(b) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            delta = (b * np.conj(r) - np.conj(a) * r) / denom
        bad = ~np.isfinite(delta)
        znew = za + np.where(bad, 0.0, delta)
        znew = np.maximum(znew.real, 0.0) + 1j * znew.imag
        idx_alive = np.flatnonzero(alive)
        z[idx_alive] = znew
        if bad.any():
            alive[idx_alive[bad]] = False
    return z, ok


def invert_f(
    pair: WeierstrassPair,
    target: tuple[float, float] | complex,
    initial: complex = 1.0 + 0.0j,
    tol: float = 1e-12,
    max_iter: int = 50,
) -> complex:
    """Invert f at one target point; Newton with the exact Jacobian.

    Terminates when |f(zeta) - target| <= tol*(1 + |target|); raises
    ConvergenceError (carrying the best iterate) otherwise.  The returned
    preimage has sigma >= 0.
    """
    t = complex(target[0], target[1]) if isinstance(target, tuple) else complex(target)
    z = complex(initial)
    z = complex(max(z.real, 0.0), z.imag)
    best, best_r = z, np.inf
    for _ in range(max_iter):
        jet = pair.h.jet(z)
        r = jet.v + np.conj(g_value(pair, z)) - t
        if abs(r) < best_r:
            best, best_r = z, abs(r)
        if abs(r) <= tol * (1.0 + abs(t)):
            return z
        a = jet.d1
        b = -pair.k / np.conj(a)
        denom = abs(a) ** 2 - abs(b) ** 2
        if not np.isfinite(denom) or denom <= 0.0:
            raise ConvergenceError(
                f"Jacobian degenerate at zeta={z}: univalence margin {denom:g}", best=best
            )
        delta = (b * np.conj(r) - np.conj(a) * r) / denom
        z = z + complex(delta)
        z = complex(max(z.real, 0.0), z.imag)
    raise ConvergenceError(
        f"no convergence after {max_iter} iterations; best |f-target| = {best_r:.3e}",
        best=best,
    )


def _forward_cloud(pair: WeierstrassPair, window: Window) -> tuple[np.ndarray, np.ndarray]:
    """Coarse forward-evaluated lattice whose image roughly covers the window."""
    (x_lo, x_hi), (y_lo, y_hi) = window
    slack_x = 0.05 * (x_hi - x_lo)
    slack_y = 0.05 * (y_hi - y_lo)
    zetas = f_img = None
    for m in range(15):
        span = 2.0**m
        sigmas = np.geomspace(1e-4 * span, span, 40)
        taus = np.linspace(-span, span, 81)
        zetas = (sigmas[:, None] + 1j * taus[None, :]).ravel()
        f_img = _f_values(pair, zetas)
        if (
            f_img.real.min() <= x_lo + slack_x and f_img.real.max() >= x_hi - slack_x
            and f_img.imag.min() <= y_lo + slack_y and f_img.imag.max() >= y_hi - slack_y
        ):
            break
    pad_x = 0.25 * (x_hi - x_lo) + 0.5
    pad_y = 0.25 * (y_hi - y_lo) + 0.5
    near = (
        (f_img.real >= x_lo - pad_x) & (f_img.real <= x_hi + pad_x)
        & (f_img.imag >= y_lo - pad_y) & (f_img.imag <= y_hi + pad_y)
    )
    if near.any():
        return zetas[near], f_img[near]
    return zetas, f_img


def reconstruct_u(
    pair: WeierstrassPair,
    window: Window,
    spacing: float,
    newton_tol: float = 1e-12,
    max_iter: int = 50,
) -> ScalarField2D:
    """Invert f on every grid node of the window and set u = k0*sigma.

    A seed column is solved from nearest-cloud initial guesses, then columns
    march outward, each row seeded by its neighbor's preimage.  Nodes whose
    inversion fails (in particular nodes outside the image domain) are
    masked out; the attached stats record the failure count and whether a
    seed could be placed at all.
    """
    if pair.g is None:
        raise ParameterError("grid reconstruction needs a pair with closed-form g")
    xs = _axis(window[0], spacing)
    ys = _axis(window[1], spacing)
    nx, ny = len(xs), len(ys)
    targets = xs[None, :] + 1j * ys[:, None]
    zeta = np.full((ny, nx), np.nan, dtype=complex)
    ok = np.zeros((ny, nx), dtype=bool)

    cloud_z, cloud_f = _forward_cloud(pair, window)
    tree = cKDTree(np.column_stack([cloud_f.real, cloud_f.imag]))

    def cloud_guesses(i: int) -> np.ndarray:
        _, idx = tree.query(np.column_stack([np.full(ny, xs[i]), ys]))
        return cloud_z[idx]

    def solve_column(i: int, guesses: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        z, good = _newton_batch(pair, targets[:, i], guesses, newton_tol, max_iter)
        for _ in range(2):  # repair rows from solved row-neighbors
            retry_guess = np.full(ny, np.nan, dtype=complex)
            for j in np.flatnonzero(~good):
                if j > 0 and good[j - 1]:
                    retry_guess[j] = z[j - 1]
                elif j + 1 < ny and good[j + 1]:
                    retry_guess[j] = z[j + 1]
            retry = np.isfinite(retry_guess)
            if not retry.any():
                break
            z2, good2 = _newton_batch(
                pair, targets[retry, i], retry_guess[retry], newton_tol, max_iter
            )
            z[retry] = np.where(good2, z2, z[retry])
            good[retry] |= good2
        return z, good

    # place the seed column, middle outward
    seed_i = None
    for i in sorted(range(nx), key=lambda col: (abs(col - nx // 2), col)):
        z, good = solve_column(i, cloud_guesses(i))
        if good.any():
            seed_i = i
            zeta[:, i], ok[:, i] = z, good
            break

    if seed_i is None:
        stats = ReconstructionStats(attempted=nx * ny, solved=0, failed=nx * ny,
                                    seed_placed=False)
        return ScalarField2D(
            origin=(float(xs[0]), float(ys[0])), spacing=float(spacing),
            nx=nx, ny=ny, values=np.full((ny, nx), np.nan), mask=ok, stats=stats,
        )

    for direction in (1, -1):
        cols = range(seed_i + direction, nx if direction > 0 else -1, direction)
        for i in cols:
            prev = i - direction
            guesses = np.where(ok[:, prev], zeta[:, prev], np.nan + 0j)
            missing = ~np.isfinite(guesses)
            if missing.any():
                guesses[missing] = cloud_guesses(i)[missing]
            z, good = solve_column(i, guesses)
            zeta[:, i], ok[:, i] = z, good

    values = np.where(ok, pair.k0 * zeta.real, np.nan)
    stats = ReconstructionStats(
        attempted=nx * ny, solved=int(ok.sum()), failed=int(nx * ny - ok.sum()),
        seed_placed=True,
    )
    return ScalarField2D(
        origin=(float(xs[0]), float(ys[0])), spacing=float(spacing),
        nx=nx, ny=ny, values=values, mask=ok, stats=stats,
    )


def preimages(pair: WeierstrassPair, field: ScalarField2D) -> np.ndarray:
    """Preimage grid zeta = f^{-1}(x, y) for the masked nodes of a field
    (NaN elsewhere); seeds come from a fresh forward cloud."""
    xs, ys = field.xs(), field.ys()
    window = ((float(xs[0]), float(xs[-1])), (float(ys[0]), float(ys[-1])))
    cloud_z, cloud_f = _forward_cloud(pair, window)
    tree = cKDTree(np.column_stack([cloud_f.real, cloud_f.imag]))
    targets = (xs[None, :] + 1j * ys[:, None])[field.mask]
    _, idx = tree.query(np.column_stack([targets.real, targets.imag]))
    z, good = _newton_batch(pair, targets, cloud_z[idx], 1e-12, 50)
    out = np.full(field.values.shape, np.nan, dtype=complex)
    out[field.mask] = np.where(good, z, np.nan)
    return out


# ---------------------------------------------------------------------------
# Centered stencil operators
# ---------------------------------------------------------------------------

def _core_shifts(u: np.ndarray):
    return {
        "C": u[1:-1, 1:-1], "E": u[1:-1, 2:], "W": u[1:-1, :-2],
        "N": u[2:, 1:-1], "S": u[:-2, 1:-1],
        "NE": u[2:, 2:], "NW": u[2:, :-2], "SE": u[:-2, 2:], "SW": u[:-2, :-2],
    }


def _interior_or_raise(field: ScalarField2D) -> np.ndarray:
    interior = field.interior_mask()
    if not interior.any():
        raise EmptyInteriorError("no interior nodes (mask too sparse for a 3x3 stencil)")
    return interior


def _derived_field(field: ScalarField2D, core_values: np.ndarray,
                   mask: np.ndarray) -> ScalarField2D:
    values = np.full_like(field.values, np.nan)
    values[1:-1, 1:-1] = np.where(mask[1:-1, 1:-1], core_values, np.nan)
    return replace(field, values=values, mask=mask, stats=None)


def msr_residual(field: ScalarField2D) -> ResidualReport:
    """Conservative divergence-form residual of the minimal surface equation.

    Face gradients use compact centered differences, so the residual is
    discrete-exact (within rounding) on linear fields and second-order
    accurate on smooth ones.
    """
    interior = _interior_or_raise(field)
    u, h = field.values, field.spacing
    s = _core_shifts(u)
    with np.errstate(invalid="ignore"):
        ux_e = (s["E"] - s["C"]) / h
        uy_e = (s["N"] + s["NE"] - s["S"] - s["SE"]) / (4 * h)
        ux_w = (s["C"] - s["W"]) / h
        uy_w = (s["NW"] + s["N"] - s["SW"] - s["S"]) / (4 * h)
        uy_n = (s["N"] - s["C"]) / h
        ux_n = (s["E"] + s["NE"] - s["W"] - s["NW"]) / (4 * h)
        uy_s = (s["C"] - s["S"]) / h
        ux_s = (s["SE"] + s["E"] - s["SW"] - s["W"]) / (4 * h)
        flux = lambda ux, uy: ux / np.sqrt(1.0 + ux * ux + uy * uy)
        res = (flux(ux_e, uy_e) - flux(ux_w, uy_w)) / h \
            + (flux(uy_n, ux_n) - flux(uy_s, ux_s)) / h
    vals = res[interior[1:-1, 1:-1]]
    return ResidualReport(
        spacing=field.spacing,
        max_abs_residual=float(np.max(np.abs(vals))),
        l2_residual=float(np.sqrt(np.mean(vals**2))),
        node_count=int(vals.size),
    )


def residual_convergence_order(coarse: ResidualReport, fine: ResidualReport) -> float:
    """Observed order from the max-norm residuals of two refinements."""
    if fine.spacing >= coarse.spacing:
        raise ParameterError("fine report must have the smaller spacing")
    return float(
        np.log(coarse.max_abs_residual / fine.max_abs_residual)
        / np.log(coarse.spacing / fine.spacing)
    )


def _first_second(field: ScalarField2D):
    u, h = field.values, field.spacing
    s = _core_shifts(u)
    with np.errstate(invalid="ignore"):
        ux = (s["E"] - s["W"]) / (2 * h)
        uy = (s["N"] - s["S"]) / (2 * h)
        uxx = (s["E"] - 2 * s["C"] + s["W"]) / h**2
        uyy = (s["N"] - 2 * s["C"] + s["S"]) / h**2
        uxy = (s["NE"] - s["NW"] - s["SE"] + s["SW"]) / (4 * h**2)
    return ux, uy, uxx, uyy, uxy


def F_operator(field: ScalarField2D) -> ScalarField2D:
    """Nodewise F = uy^2*uxx + ux^2*uyy - 2*ux*uy*uxy on interior nodes."""
    interior = _interior_or_raise(field)
    ux, uy, uxx, uyy, uxy = _first_second(field)
    core = uy * uy * uxx + ux * ux * uyy - 2.0 * ux * uy * uxy
    return _derived_field(field, core, interior)


def laplacian(field: ScalarField2D) -> ScalarField2D:
    """Five-point Laplacian on interior nodes; negativity everywhere is the
    superharmonicity signature of nonplanar concave-domain solutions."""
    interior = _interior_or_raise(field)
    _, _, uxx, uyy, _ = _first_second(field)
    return _derived_field(field, uxx + uyy, interior)


def levelset_curvature_field(
    field: ScalarField2D, c: float, grad_floor: float = 1e-8
) -> ScalarField2D:
    """Graph-form level-set curvature F(u-c)/|grad u|^3 (F is shift-invariant,
    so the level offset c does not change the nodal values, only where they
    are meaningful).  Nodes with |grad u| below ``grad_floor`` are masked."""
    interior = _interior_or_raise(field)
    ux, uy, uxx, uyy, uxy = _first_second(field)
    grad = np.sqrt(ux * ux + uy * uy)
    core_f = uy * uy * uxx + ux * ux * uyy - 2.0 * ux * uy * uxy
    with np.errstate(invalid="ignore", divide="ignore"):
        core = core_f / grad**3
    mask = interior.copy()
    mask[1:-1, 1:-1] &= grad >= grad_floor
    return _derived_field(field, core, mask)


def nondivergence_gap(field: ScalarField2D) -> float:
    """Diagnostic only: max |laplacian(u) + F| / (1+|grad u|^2)^{3/2} over
    interior nodes.  Recorded alongside the residual reports; no identity is
    asserted from it."""
    interior = _interior_or_raise(field)
    ux, uy, uxx, uyy, uxy = _first_second(field)
    lap = uxx + uyy
    f_op = uy * uy * uxx + ux * ux * uyy - 2.0 * ux * uy * uxy
    gap = np.abs(lap + f_op) / (1.0 + ux * ux + uy * uy) ** 1.5
    return float(np.max(gap[interior[1:-1, 1:-1]]))


# ---------------------------------------------------------------------------
# Report builders used by the CLI verify command
# ---------------------------------------------------------------------------

def superharmonic_report(field: ScalarField2D, descriptor: str = "") -> VerificationReport:
    """Pass iff the discrete Laplacian is strictly negative at every interior node."""
    lap = laplacian(field)
    vals = lap.values[lap.mask]
    worst = float(np.max(vals))
    j, i = np.unravel_index(int(np.argmax(np.where(lap.mask, lap.values, -np.inf))),
                            lap.values.shape)
    return VerificationReport(
        check_name="superharmonicity",
        passed=bool(np.all(vals < 0.0)),
        empirical_constant=worst,
        extremal_point=lap.node_xy(j, i),
        tolerance=0.0,
        grid_descriptor=descriptor or f"h={field.spacing:g}, {int(lap.mask.sum())} interior nodes",
        notes=f"max laplacian over interior = {worst:.6e} (must be < 0)",
    )


def msr_report(
    coarse: ScalarField2D,
    fine: ScalarField2D,
    exact_tol: float = 1e-10,
    ratio_range: tuple[float, float] = (3.0, 5.0),
    descriptor: str = "",
) -> VerificationReport:
    """PDE residual check across one grid refinement.

    Fields that are discrete-exact (both residuals below ``exact_tol``) pass
    outright; otherwise the max-norm residual ratio must fall in
    ``ratio_range`` (second-order convergence).
    """
    rep_c = msr_residual(coarse)
    rep_f = msr_residual(fine)
    gap = nondivergence_gap(fine)
    if rep_c.max_abs_residual <= exact_tol and rep_f.max_abs_residual <= exact_tol:
        passed, ratio = True, float("nan")
        note = "discrete-exact field (residual at rounding level at both spacings)"
    else:
        ratio = rep_c.max_abs_residual / rep_f.max_abs_residual
        passed = ratio_range[0] <= ratio <= ratio_range[1]
        note = (
            f"max residual {rep_c.max_abs_residual:.3e} (h={rep_c.spacing:g}) -> "
            f"{rep_f.max_abs_residual:.3e} (h={rep_f.spacing:g}), ratio {ratio:.3f}"
        )
    note += f"; diagnostic |lap u + F|/(1+|grad u|^2)^1.5 max = {gap:.3e}"
    return VerificationReport(
        check_name="msr_residual",
        passed=bool(passed),
        empirical_constant=float(rep_f.max_abs_residual),
        extremal_point=None,
        tolerance=exact_tol,
        grid_descriptor=descriptor or f"h={rep_c.spacing:g} vs h={rep_f.spacing:g}",
        notes=note,
    )
