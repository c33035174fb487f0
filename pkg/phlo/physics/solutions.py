"""
Closed-form helical solutions

    u = phi(x, y, xi + eps z) cos(-eps kappa z / l0 + const)
    p = phi(x, y, xi + eps z) sin(-eps kappa z / l0 + const)

with their equation-of-motion residuals, the energy and one-period action
integrals, and the support geometry used by the quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import ConfigError, CoverageError
from ..core.logging import get_logger
from ..forms.exterior import DIM, interior_2_3
from ..forms.fields import (
    FieldPair,
    ProductField,
    ScalarField,
    ScalarJet,
    as_point,
    build_frame_jets,
    build_null_frame,
    exterior_derivative,
    mollifier,
    phase_jet,
    zeta_bar,
)
from ..models.schemas import AmplitudeKind, AmplitudeSpec, GridSpec, PhLOConfig
from ..numerics import QuadratureResult, grid_mesh, simpson_1d, simpson_sampled
from .frobenius import integrability_4forms
from .stress_energy import frame_energy_tensor

logger = get_logger(__name__)

Extents = Tuple[Tuple[float, float], ...]

# random checks draw gaussian points from this many widths; the cutoff box only bounds quadrature
GAUSSIAN_SAMPLE_WIDTHS = 3.0


def _gaussian(q: np.ndarray, cutoff: float) -> Tuple[np.ndarray, np.ndarray]:
    """exp(-q), cut to 0 for q > cutoff^2 so the support is exactly the cutoff box."""
    q = np.asarray(q, dtype=float)
    e = np.where(q <= cutoff**2, np.exp(-q), 0.0)
    return e, -e


class HelicalAmplitude(ScalarField):
    """phi(x, y, s), s = xi + eps z: a transverse profile around a helix times a longitudinal one.

    The helix centre (a cos(kappa s / l0), a sin(kappa s / l0)) has radius
    a = helix_radius; a = 0 is the straight tube along the z-axis.
    """

    def __init__(self, spec: AmplitudeSpec, epsilon: int, kappa: int, l0: float):
        if not spec.r0 > 0 or not spec.s0 > 0:
            raise ConfigError(f"amplitude widths must be positive, got r0={spec.r0}, s0={spec.s0}")
        self.spec = spec
        self.epsilon = epsilon
        self.kappa = kappa
        self.l0 = l0
        self.profile: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]
        if spec.kind == AmplitudeKind.PRODUCT_MOLLIFIER:
            self.profile = mollifier
        else:
            self.profile = partial(_gaussian, cutoff=spec.gaussian_cutoff)

    def center(self, s: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Helix centre and its s-derivative."""
        a = self.spec.helix_radius
        w = self.kappa / self.l0
        return a * np.cos(w * s), a * np.sin(w * s), -a * w * np.sin(w * s), a * w * np.cos(w * s)

    def jet(self, pt) -> ScalarJet:
        pt = as_point(pt)
        x, y, z, xi = pt
        spec = self.spec
        s = xi + self.epsilon * z
        xc, yc, dxc, dyc = self.center(s)
        dx, dy, ds = x - xc, y - yc, s - spec.s_center
        t, dt = self.profile((dx**2 + dy**2) / spec.r0**2)
        lng, dlng = self.profile(ds**2 / spec.s0**2)

        value = spec.phi0 * t * lng
        phi_x = spec.phi0 * dt * 2.0 * dx / spec.r0**2 * lng
        phi_y = spec.phi0 * dt * 2.0 * dy / spec.r0**2 * lng
        phi_s = spec.phi0 * (
            dt * (-2.0 * dx * dxc - 2.0 * dy * dyc) / spec.r0**2 * lng
            + t * dlng * 2.0 * ds / spec.s0**2
        )
        return ScalarJet(value, np.stack([phi_x, phi_y, self.epsilon * phi_s, phi_s]))


class LinearPhase(ScalarField):
    """psi = -eps kappa z / l0 + const."""

    def __init__(self, epsilon: int, kappa: int, l0: float, const: float = 0.0):
        self.rate = -epsilon * kappa / l0
        self.const = const

    def jet(self, pt) -> ScalarJet:
        pt = as_point(pt)
        grad = np.zeros_like(pt)
        grad[2] = self.rate
        return ScalarJet(self.rate * pt[2] + self.const, grad)


class CosineOf(ScalarField):
    def __init__(self, base: ScalarField):
        self.base = base

    def jet(self, pt) -> ScalarJet:
        return self.base.jet(pt).apply(np.cos, lambda v: -np.sin(v))


class SineOf(ScalarField):
    def __init__(self, base: ScalarField):
        self.base = base

    def jet(self, pt) -> ScalarJet:
        return self.base.jet(pt).apply(np.sin, np.cos)


@dataclass(frozen=True)
class SolutionField:
    config: PhLOConfig
    amplitude: ScalarField
    phase: ScalarField
    pair: FieldPair

    @property
    def epsilon(self) -> int:
        return self.pair.epsilon

    @property
    def expected_lie_psi(self) -> float:
        """kappa / l0."""
        return self.config.kappa / self.config.l0


def build_solution(cfg: PhLOConfig, amplitude: Optional[ScalarField] = None) -> SolutionField:
    """The solution field of a config; `amplitude` overrides the configured profile."""
    if amplitude is None:
        amplitude = HelicalAmplitude(cfg.amplitude, cfg.epsilon, cfg.kappa, cfg.l0)
    phase = LinearPhase(cfg.epsilon, cfg.kappa, cfg.l0, cfg.phase_const)
    pair = FieldPair(
        u=ProductField(amplitude, CosineOf(phase)),
        p=ProductField(amplitude, SineOf(phase)),
        epsilon=cfg.epsilon,
    )
    return SolutionField(config=cfg, amplitude=amplitude, phase=phase, pair=pair)


def period(cfg: PhLOConfig) -> float:
    """T = 2 pi l0 / c."""
    return cfg.period


def frequency(cfg: PhLOConfig) -> float:
    return cfg.frequency


def _support_half_widths(spec: AmplitudeSpec) -> Tuple[float, float]:
    if spec.kind == AmplitudeKind.PRODUCT_MOLLIFIER:
        return spec.r0, spec.s0
    return spec.gaussian_cutoff * spec.r0, spec.gaussian_cutoff * spec.s0


def support_box(cfg: PhLOConfig, xi: float) -> Extents:
    """Bounding box in (x, y, z) of the support on the slice xi = const."""
    half_t, half_s = _support_half_widths(cfg.amplitude)
    reach = cfg.amplitude.helix_radius + half_t
    s_lo = cfg.amplitude.s_center - half_s
    s_hi = cfg.amplitude.s_center + half_s
    z_ends = sorted((cfg.epsilon * (s_lo - xi), cfg.epsilon * (s_hi - xi)))
    return ((-reach, reach), (-reach, reach), (z_ends[0], z_ends[1]))


def support_geometry(cfg: PhLOConfig, pt) -> np.ndarray:
    """Whether pt lies in the tube: distance to the helix <= r0 and |s - s_center| <= s0."""
    pt = as_point(pt)
    x, y, z, xi = pt
    half_t, half_s = _support_half_widths(cfg.amplitude)
    s = xi + cfg.epsilon * z
    xc, yc, _, _ = HelicalAmplitude(cfg.amplitude, cfg.epsilon, cfg.kappa, cfg.l0).center(s)
    radial = np.hypot(x - xc, y - yc)
    return (radial <= half_t) & (np.abs(s - cfg.amplitude.s_center) <= half_s)


def support_points(cfg: PhLOConfig, rng: np.random.Generator, n: int) -> np.ndarray:
    """n random points inside the tube, xi uniform over one length l0."""
    half_t, half_s = _support_half_widths(cfg.amplitude)
    if cfg.amplitude.kind == AmplitudeKind.TRUNCATED_GAUSSIAN:
        widths = min(GAUSSIAN_SAMPLE_WIDTHS, cfg.amplitude.gaussian_cutoff)
        half_t, half_s = widths * cfg.amplitude.r0, widths * cfg.amplitude.s0
    xi = rng.uniform(0.0, cfg.l0, n)
    s = cfg.amplitude.s_center + rng.uniform(-half_s, half_s, n)
    radius = half_t * np.sqrt(rng.uniform(0.0, 1.0, n))
    angle = rng.uniform(0.0, 2.0 * np.pi, n)
    xc, yc, _, _ = HelicalAmplitude(cfg.amplitude, cfg.epsilon, cfg.kappa, cfg.l0).center(s)
    return np.stack([xc + radius * np.cos(angle), yc + radius * np.sin(angle), cfg.epsilon * (s - xi), xi])


@dataclass(frozen=True)
class EomResiduals:
    lie_phi2: float
    lie_psi: float
    phase_points: int


def eom_residuals(sol: SolutionField, pts) -> EomResiduals:
    """(max |L phi^2|, max |L psi - kappa/l0|), the second over points with a defined phase."""
    u = sol.pair.u.jet(pts)
    p = sol.pair.p.jet(pts)
    zb = zeta_bar(sol.epsilon)
    lie_phi2 = (u * u + p * p).directional(zb)
    psi, defined = phase_jet(u, p, sol.config.tolerances.phase_floor)
    lie_psi = psi.directional(zb)
    psi_residual = np.abs(lie_psi - sol.expected_lie_psi)[defined]
    return EomResiduals(
        lie_phi2=float(np.max(np.abs(lie_phi2))),
        lie_psi=float(np.max(psi_residual)) if psi_residual.size else 0.0,
        phase_points=int(np.count_nonzero(defined)),
    )


@dataclass(frozen=True)
class NonlinearCheck:
    iF_dF: float
    iS_dS: float
    cross: float
    max_dF: float


def nonlinear_equation_check(fp: FieldPair, pts) -> NonlinearCheck:
    """i(F^)dF, i(*F^)d*F, i(*F^)dF + i(F^)d*F and max |dF|."""
    jets = build_frame_jets(fp, pts)
    F, S = jets.F.value, jets.starF.value
    dF, dS = jets.dF, jets.dstarF
    cross = interior_2_3(S, dF) + interior_2_3(F, dS)
    return NonlinearCheck(
        iF_dF=interior_2_3(F, dF).norm_inf(),
        iS_dS=interior_2_3(S, dS).norm_inf(),
        cross=cross.norm_inf(),
        max_dF=exterior_derivative(jets.F).norm_inf(),
    )


def _spatial_grid(cfg: PhLOConfig) -> GridSpec:
    grid = cfg.grid
    if len(grid.counts) != 3:
        raise ConfigError(f"spatial integrals need three grid counts, got {len(grid.counts)}")
    if grid.extents is not None and len(grid.extents) != 3:
        raise ConfigError(f"spatial integrals need three grid extents, got {len(grid.extents)}")
    return grid


def _check_coverage(grid: GridSpec, cfg: PhLOConfig, xi: float) -> None:
    if grid.extents is None:
        raise ConfigError("grid extents are not set")
    for axis, ((lo, hi), (need_lo, need_hi)) in enumerate(zip(grid.extents, support_box(cfg, xi))):
        if lo > need_lo or hi < need_hi:
            raise CoverageError(
                f"grid axis {axis} spans [{lo}, {hi}] but the support at xi={xi} needs [{need_lo}, {need_hi}]"
            )


def _slice_grid(cfg: PhLOConfig, xi: float) -> GridSpec:
    grid = _spatial_grid(cfg)
    if grid.extents is None:
        return GridSpec(counts=grid.counts, xi_counts=grid.xi_counts, extents=support_box(cfg, xi))
    _check_coverage(grid, cfg, xi)
    return grid


def covering_grid(cfg: PhLOConfig, xis: Sequence[float]) -> GridSpec:
    """One spatial grid covering the support on every slice in xis.

    Without configured extents this is the union of the slices' support boxes,
    so different slices sample the field at different nodes.
    """
    grid = _spatial_grid(cfg)
    if grid.extents is None:
        boxes = [support_box(cfg, float(xi)) for xi in xis]
        extents = tuple(
            (min(box[axis][0] for box in boxes), max(box[axis][1] for box in boxes)) for axis in range(3)
        )
        grid = GridSpec(counts=grid.counts, xi_counts=grid.xi_counts, extents=extents)
    for xi in xis:
        _check_coverage(grid, cfg, float(xi))
    return grid


def _slice_points(grid: GridSpec, xi: float) -> np.ndarray:
    x, y, z = np.broadcast_arrays(*grid_mesh(grid))
    return np.stack([x, y, z, np.full(x.shape, float(xi))])


def energy_integral(sol: SolutionField, xi: float = 0.0, grid: Optional[GridSpec] = None) -> QuadratureResult:
    """E = integral of T_4^4 over the slice xi = const.

    The grid defaults to the one fitted to this slice; a given grid must cover the support.
    """
    if grid is None:
        grid = _slice_grid(sol.config, xi)
    else:
        _check_coverage(grid, sol.config, xi)
    frame = build_null_frame(sol.pair, _slice_points(grid, xi))
    return simpson_sampled(frame_energy_tensor(frame).energy_density, grid.spacing())


@dataclass(frozen=True)
class IntegralMomentum:
    P: np.ndarray
    square: float
    error: float


def integral_momentum(sol: SolutionField, xi: float = 0.0) -> IntegralMomentum:
    """P_mu = integral of T_mu^4 dV; P_mu P^mu vanishes for a massless object."""
    grid = _slice_grid(sol.config, xi)
    frame = build_null_frame(sol.pair, _slice_points(grid, xi))
    column = frame_energy_tensor(frame).mixed[:, 3]
    results = [simpson_sampled(column[mu], grid.spacing()) for mu in range(DIM)]
    P = np.array([r.value for r in results])
    square = float(-P[0] ** 2 - P[1] ** 2 - P[2] ** 2 + P[3] ** 2)
    return IntegralMomentum(P=P, square=square, error=max(r.richardson_error for r in results))


@dataclass(frozen=True)
class ActionResult:
    action: float
    action_error: float
    action_star: float
    energy: QuadratureResult
    period: float
    ratio: Optional[float]
    expected_ratio: int

    @property
    def star_agreement(self) -> float:
        """Relative difference of the dA ^ A ^ zeta and dA* ^ A* ^ zeta actions."""
        scale = max(abs(self.action), abs(self.action_star))
        return 0.0 if scale == 0.0 else abs(self.action - self.action_star) / scale


def action_integral(sol: SolutionField, xi0: float = 0.0) -> ActionResult:
    """(2 pi l0 / c) times the integral of dA ^ A ^ zeta over R^3 x [xi0, xi0 + l0]."""
    cfg = sol.config
    xis = np.linspace(xi0, xi0 + cfg.l0, cfg.grid.xi_counts)
    h_xi = cfg.l0 / (cfg.grid.xi_counts - 1)
    slices, slices_star, errors = [], [], []
    for xi in xis:
        grid = _slice_grid(cfg, float(xi))
        forms = integrability_4forms(sol.pair, _slice_points(grid, float(xi)))
        inner = simpson_sampled(forms.dA_A_zeta, grid.spacing())
        slices.append(inner.value)
        errors.append(inner.richardson_error)
        slices_star.append(simpson_sampled(forms.dAstar_Astar_zeta, grid.spacing()).value)

    T = cfg.period
    outer = simpson_1d(np.array(slices), h_xi)
    action = T * outer.value
    action_error = T * (outer.richardson_error + simpson_1d(np.array(errors), h_xi).value)
    action_star = T * simpson_1d(np.array(slices_star), h_xi).value

    energy = energy_integral(sol, xi0)
    ratio = action / (energy.value * T) if energy.value > 0.0 else None
    logger.debug("Action integrated", action=action, energy=energy.value, ratio=ratio)
    return ActionResult(
        action=action,
        action_error=action_error,
        action_star=action_star,
        energy=energy,
        period=T,
        ratio=ratio,
        expected_ratio=cfg.epsilon * cfg.kappa,
    )
