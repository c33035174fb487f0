"""
Scalar fields with exact first derivatives, the finite-difference oracle and
the null-field frame (zeta, A, A*, F, *F, phi^2, psi) built from (u, p, eps).
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import ConfigError, DegreeError, InvariantViolation, NumericError
from ..core.logging import get_logger
from ..numerics import gradient_4
from .exterior import DIM, KForm, hodge, wedge

logger = get_logger(__name__)

ANALYTIC = "analytic"
FINITE_DIFFERENCE = "finite-difference"

DEFAULT_PHASE_FLOOR = 1e-14


def as_point(pt) -> np.ndarray:
    arr = np.asarray(pt, dtype=float)
    if arr.shape[:1] != (DIM,):
        raise ValueError(f"points have shape (4, *batch), got {arr.shape}")
    return arr


def _expand(vec: np.ndarray, ndim: int) -> np.ndarray:
    """Reshape a (4,) vector so it broadcasts against (4, *batch) of ndim axes."""
    vec = np.asarray(vec, dtype=float)
    return vec.reshape(vec.shape + (1,) * (ndim - vec.ndim)) if ndim > vec.ndim else vec


@dataclass(frozen=True)
class ScalarJet:
    """Value and exact 4-gradient (d_x, d_y, d_z, d_xi) of a scalar field."""

    value: np.ndarray
    grad: np.ndarray

    def __post_init__(self) -> None:
        if not (np.all(np.isfinite(self.value)) and np.all(np.isfinite(self.grad))):
            raise NumericError("jet has non-finite entries")

    @classmethod
    def constant(cls, value, batch_shape: Tuple[int, ...] = ()) -> "ScalarJet":
        v = np.broadcast_to(np.asarray(value, dtype=float), batch_shape).copy()
        return cls(v, np.zeros((DIM,) + tuple(batch_shape)))

    def __add__(self, other: "ScalarJet") -> "ScalarJet":
        return ScalarJet(self.value + other.value, self.grad + other.grad)

    def __sub__(self, other: "ScalarJet") -> "ScalarJet":
        return ScalarJet(self.value - other.value, self.grad - other.grad)

    def __neg__(self) -> "ScalarJet":
        return ScalarJet(-self.value, -self.grad)

    def __mul__(self, other) -> "ScalarJet":
        if isinstance(other, ScalarJet):
            return ScalarJet(
                self.value * other.value,
                self.grad * other.value + self.value * other.grad,
            )
        return ScalarJet(self.value * other, self.grad * other)

    __rmul__ = __mul__

    def apply(self, fn: Callable[[np.ndarray], np.ndarray], dfn: Callable[[np.ndarray], np.ndarray]) -> "ScalarJet":
        """Chain rule: jet of fn(self)."""
        return ScalarJet(fn(self.value), dfn(self.value) * self.grad)

    def directional(self, X) -> np.ndarray:
        """X^mu d_mu f."""
        return np.sum(_expand(X, self.grad.ndim) * self.grad, axis=0)


class ScalarField(ABC):
    """A scalar function of (x, y, z, xi) carrying its jet."""

    provenance: str = ANALYTIC

    @abstractmethod
    def jet(self, pt) -> ScalarJet:
        """Value and gradient at pt (shape (4, *batch))."""

    def eval(self, pt) -> np.ndarray:
        return self.jet(pt).value

    def __call__(self, pt) -> np.ndarray:
        return self.eval(pt)

    def __add__(self, other: "ScalarField") -> "ScalarField":
        return SumField(self, other)

    def __mul__(self, other) -> "ScalarField":
        if isinstance(other, ScalarField):
            return ProductField(self, other)
        return ProductField(self, Polynomial.constant(float(other)))

    __rmul__ = __mul__

    def __neg__(self) -> "ScalarField":
        return self * -1.0


class Polynomial(ScalarField):
    """Sum of monomials c * x^a y^b z^c xi^d."""

    def __init__(self, terms: Sequence[Tuple[float, Sequence[int]]]):
        self.terms = tuple((float(c), tuple(int(e) for e in exps)) for c, exps in terms)
        for _, exps in self.terms:
            if len(exps) != DIM or min(exps) < 0:
                raise ValueError(f"monomial exponents must be four non-negative ints, got {exps}")

    @classmethod
    def constant(cls, value: float) -> "Polynomial":
        return cls([(value, (0, 0, 0, 0))])

    @classmethod
    def coordinate(cls, axis: int, scale: float = 1.0) -> "Polynomial":
        exps = [0, 0, 0, 0]
        exps[axis] = 1
        return cls([(scale, exps)])

    @classmethod
    def random(cls, rng: np.random.Generator, degree: int = 2, n_terms: int = 6) -> "Polynomial":
        terms = []
        for _ in range(n_terms):
            exps = [0, 0, 0, 0]
            for _ in range(int(rng.integers(0, degree + 1))):
                exps[int(rng.integers(0, DIM))] += 1
            terms.append((float(rng.uniform(-1.0, 1.0)), exps))
        return cls(terms)

    def jet(self, pt) -> ScalarJet:
        pt = as_point(pt)
        batch = pt.shape[1:]
        value = np.zeros(batch)
        grad = np.zeros((DIM,) + batch)
        for coef, exps in self.terms:
            powers = [pt[i] ** e for i, e in enumerate(exps)]
            value = value + coef * np.prod(powers, axis=0)
            for a, e in enumerate(exps):
                if e == 0:
                    continue
                factors = [powers[i] if i != a else e * pt[a] ** (e - 1) for i in range(DIM)]
                grad[a] = grad[a] + coef * np.prod(factors, axis=0)
        return ScalarJet(value, grad)


class Trigonometric(ScalarField):
    """amplitude * sin(k . x + phase) (or cos)."""

    def __init__(self, amplitude: float, wavevector: Sequence[float], phase: float = 0.0, kind: str = "sin"):
        if kind not in ("sin", "cos"):
            raise ValueError(f"kind must be 'sin' or 'cos', got {kind}")
        self.amplitude = float(amplitude)
        self.wavevector = np.asarray(wavevector, dtype=float)
        self.phase = float(phase)
        self.kind = kind

    def jet(self, pt) -> ScalarJet:
        pt = as_point(pt)
        arg = np.sum(_expand(self.wavevector, pt.ndim) * pt, axis=0) + self.phase
        if self.kind == "sin":
            value, slope = np.sin(arg), np.cos(arg)
        else:
            value, slope = np.cos(arg), -np.sin(arg)
        grad = _expand(self.wavevector, pt.ndim) * (self.amplitude * slope)
        return ScalarJet(self.amplitude * value, grad)


def mollifier(q: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """b(q) = exp(-q / (1 - q)) for q < 1, else 0; returns (b, db/dq)."""
    q = np.asarray(q, dtype=float)
    inside = q < 1.0
    denom = np.where(inside, 1.0 - q, 1.0)
    b = np.where(inside, np.exp(-q / denom), 0.0)
    db = np.where(inside, -b / denom**2, 0.0)
    return b, db


class MollifierBump(ScalarField):
    """Compactly supported bump amplitude * b(|x - center|^2 / radius^2) in R^4."""

    def __init__(self, center: Sequence[float], radius: float, amplitude: float = 1.0):
        if not radius > 0:
            raise ValueError(f"bump radius must be positive, got {radius}")
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.amplitude = float(amplitude)

    def jet(self, pt) -> ScalarJet:
        pt = as_point(pt)
        offset = pt - _expand(self.center, pt.ndim)
        q = np.sum(offset**2, axis=0) / self.radius**2
        b, db = mollifier(q)
        grad = self.amplitude * db * 2.0 * offset / self.radius**2
        return ScalarJet(self.amplitude * b, grad)


class PlaneWaveProfile(ScalarField):
    """f(x, y, xi + eps*z) = a cos(k s + phase) exp(-(x^2 + y^2) / w^2).

    Annihilated by d_xi - eps d_z, so any pair built from such profiles has R = 0.
    """

    def __init__(self, epsilon: int, amplitude: float = 1.0, wavenumber: float = 1.0,
                 phase: float = 0.0, width: float = 1.0):
        self.epsilon = int(epsilon)
        self.amplitude = float(amplitude)
        self.wavenumber = float(wavenumber)
        self.phase = float(phase)
        self.width = float(width)

    def jet(self, pt) -> ScalarJet:
        pt = as_point(pt)
        x, y, z, xi = pt
        s = xi + self.epsilon * z
        arg = self.wavenumber * s + self.phase
        envelope = np.exp(-(x**2 + y**2) / self.width**2)
        wave = self.amplitude * np.cos(arg)
        dwave = -self.amplitude * self.wavenumber * np.sin(arg)
        value = wave * envelope
        grad = np.stack([
            wave * envelope * (-2.0 * x / self.width**2),
            wave * envelope * (-2.0 * y / self.width**2),
            self.epsilon * dwave * envelope,
            dwave * envelope,
        ])
        return ScalarJet(value, grad)


class SumField(ScalarField):
    def __init__(self, *parts: ScalarField):
        self.parts = parts

    def jet(self, pt) -> ScalarJet:
        jets = [p.jet(pt) for p in self.parts]
        out = jets[0]
        for j in jets[1:]:
            out = out + j
        return out


class ProductField(ScalarField):
    def __init__(self, *parts: ScalarField):
        self.parts = parts

    def jet(self, pt) -> ScalarJet:
        jets = [p.jet(pt) for p in self.parts]
        out = jets[0]
        for j in jets[1:]:
            out = out * j
        return out


class FiniteDifferenceField(ScalarField):
    """A plain function whose jet comes from the 4th-order stencil."""

    provenance = FINITE_DIFFERENCE

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], h: float = 1e-3):
        self.fn = fn
        self.h = h

    def eval(self, pt) -> np.ndarray:
        return np.asarray(self.fn(as_point(pt)), dtype=float)

    def jet(self, pt) -> ScalarJet:
        return fd_jet(self.fn, pt, self.h)


def fd_jet(f: Callable[[np.ndarray], np.ndarray], pt, h: float) -> ScalarJet:
    """Finite-difference jet (4th-order central differences per axis)."""
    pt = as_point(pt)
    value = np.asarray(f(pt), dtype=float)
    if not np.all(np.isfinite(value)):
        raise NumericError("non-finite sample in fd_jet")
    return ScalarJet(value, gradient_4(f, pt, h))


def directional(X, f: ScalarField, pt) -> np.ndarray:
    """X^mu d_mu f at pt; along zeta_bar this is the Lie derivative of f."""
    return f.jet(pt).directional(X)


@dataclass(frozen=True)
class FieldPair:
    """(u, p) and the propagation sign eps."""

    u: ScalarField
    p: ScalarField
    epsilon: int

    def __post_init__(self) -> None:
        if self.epsilon not in (-1, 1):
            raise ConfigError(f"epsilon must be +1 or -1, got {self.epsilon}")


def zeta(epsilon: int) -> KForm:
    """zeta = eps dz + dxi."""
    return KForm(1, [0.0, 0.0, float(epsilon), 1.0])


def zeta_bar(epsilon: int) -> np.ndarray:
    """zeta^ = (0, 0, -eps, 1)."""
    return np.array([0.0, 0.0, -float(epsilon), 1.0])


def _one_form(coefficients: Sequence[Optional[np.ndarray]]) -> KForm:
    batch = np.broadcast_shapes(*[np.shape(c) for c in coefficients if c is not None])
    return KForm(1, np.stack([
        np.zeros(batch) if c is None else np.broadcast_to(c, batch) for c in coefficients
    ]))


@dataclass(frozen=True)
class NullFrame:
    """The null-field bundle at a point (or a batch of points)."""

    epsilon: int
    zeta: KForm
    A: KForm
    Astar: KForm
    F: KForm
    starF: KForm
    phi2: np.ndarray
    psi: np.ndarray
    phase_defined: np.ndarray


def build_null_frame(fp: FieldPair, pt, phase_floor: float = DEFAULT_PHASE_FLOOR) -> NullFrame:
    """zeta = eps dz + dxi, A = u dx + p dy, A* = eps p dx - eps u dy, F = A ^ zeta, *F = hodge(F)."""
    u = fp.u.eval(pt)
    p = fp.p.eval(pt)
    eps = fp.epsilon
    z = zeta(eps)
    A = _one_form([u, p, None, None])
    Astar = _one_form([eps * p, -eps * u, None, None])
    F = wedge(A, z)
    phi2 = u**2 + p**2
    defined = phi2 > phase_floor
    psi = np.where(defined, np.arctan2(p, u), np.nan)
    return NullFrame(
        epsilon=eps, zeta=z, A=A, Astar=Astar, F=F, starF=hodge(F),
        phi2=phi2, psi=psi, phase_defined=defined,
    )


@dataclass(frozen=True)
class FormJet:
    """A form together with its coordinate derivatives, grad shape (4, C, *batch)."""

    value: KForm
    grad: np.ndarray

    @property
    def grade(self) -> int:
        return self.value.grade

    def partial(self, mu: int) -> KForm:
        return KForm(self.grade, self.grad[mu])

    def hodge(self) -> "FormJet":
        return FormJet(hodge(self.value), np.stack([hodge(self.partial(mu)).components for mu in range(DIM)]))

    def wedge_right(self, c: KForm) -> "FormJet":
        """self ^ c for a constant form c."""
        return FormJet(wedge(self.value, c), np.stack([wedge(self.partial(mu), c).components for mu in range(DIM)]))

    def __mul__(self, s: float) -> "FormJet":
        return FormJet(self.value * s, self.grad * s)

    __rmul__ = __mul__

    def __neg__(self) -> "FormJet":
        return self * -1.0


def one_form_jet(coefficients: Sequence[Optional[ScalarJet]]) -> FormJet:
    """Sum_nu a_nu dx^nu from coefficient jets (None for identically zero)."""
    present = [c for c in coefficients if c is not None]
    batch = np.broadcast_shapes(*[c.value.shape for c in present])
    values = np.stack([np.zeros(batch) if c is None else np.broadcast_to(c.value, batch) for c in coefficients])
    grads = np.stack([
        np.zeros((DIM,) + batch) if c is None else np.broadcast_to(c.grad, (DIM,) + batch)
        for c in coefficients
    ], axis=1)
    return FormJet(KForm(1, values), grads)


def exterior_derivative(jet: FormJet) -> KForm:
    """d omega = Sum_mu dx^mu ^ d_mu omega."""
    if jet.grade >= DIM:
        raise DegreeError("d of a top-degree form is zero by degree")
    out = KForm.zeros(jet.grade + 1)
    for mu in range(DIM):
        out = out + wedge(KForm.basis((mu,)), jet.partial(mu))
    return out


def exterior_derivative_1form(jet: FormJet) -> KForm:
    if jet.grade != 1:
        raise DegreeError(f"expected a 1-form jet, got grade {jet.grade}")
    return exterior_derivative(jet)


def exterior_derivative_2form(jet: FormJet) -> KForm:
    if jet.grade != 2:
        raise DegreeError(f"expected a 2-form jet, got grade {jet.grade}")
    return exterior_derivative(jet)


def fd_form_jet(form_fn: Callable[[np.ndarray], KForm], pt, h: float) -> FormJet:
    """FormJet of a point-wise form-valued function by 4th-order differences."""
    pt = as_point(pt)
    return FormJet(form_fn(pt), gradient_4(lambda q: form_fn(q).components, pt, h))


@dataclass(frozen=True)
class FrameJets:
    """First derivatives of A, A*, F and *F, from the coefficient jets."""

    u: ScalarJet
    p: ScalarJet
    epsilon: int
    A: FormJet
    Astar: FormJet
    F: FormJet
    starF: FormJet

    @property
    def dA(self) -> KForm:
        return exterior_derivative_1form(self.A)

    @property
    def dAstar(self) -> KForm:
        return exterior_derivative_1form(self.Astar)

    @property
    def dF(self) -> KForm:
        return exterior_derivative_2form(self.F)

    @property
    def dstarF(self) -> KForm:
        return exterior_derivative_2form(self.starF)


def build_frame_jets(fp: FieldPair, pt) -> FrameJets:
    u = fp.u.jet(pt)
    p = fp.p.jet(pt)
    eps = fp.epsilon
    A = one_form_jet([u, p, None, None])
    Astar = one_form_jet([p * float(eps), u * float(-eps), None, None])
    # zeta is constant, so dF = dA ^ zeta and the F jet is A's jet wedged with zeta
    F = A.wedge_right(zeta(eps))
    return FrameJets(u=u, p=p, epsilon=eps, A=A, Astar=Astar, F=F, starF=F.hodge())


def phase_jet(u: ScalarJet, p: ScalarJet, phase_floor: float = DEFAULT_PHASE_FLOOR) -> Tuple[ScalarJet, np.ndarray]:
    """Jet of psi = atan2(p, u) where phi^2 > floor; gradient set to 0 elsewhere."""
    phi2 = u.value**2 + p.value**2
    defined = phi2 > phase_floor
    safe = np.where(defined, phi2, 1.0)
    grad = np.where(defined, (u.value * p.grad - p.value * u.grad) / safe, 0.0)
    value = np.where(defined, np.arctan2(p.value, u.value), 0.0)
    return ScalarJet(value, grad), defined


@lru_cache(maxsize=None)
def sigma_star(samples: int = 256, seed: int = 7) -> int:
    """The constant s with hodge(A ^ zeta) = s (A* ^ zeta), measured on random frames."""
    rng = np.random.default_rng(seed)
    signs = set()
    for eps in (1, -1):
        u = rng.uniform(-1.0, 1.0, samples)
        p = rng.uniform(-1.0, 1.0, samples)
        z = zeta(eps)
        star_f = hodge(wedge(_one_form([u, p, None, None]), z))
        a_star_z = wedge(_one_form([eps * p, -eps * u, None, None]), z)
        for s in (1, -1):
            residual = np.max(np.abs(star_f.components - s * a_star_z.components), axis=0)
            if np.any(residual < 1e-12):
                signs.add(s)
                if not np.all(residual < 1e-12):
                    raise InvariantViolation(f"sign {s} holds only on part of the eps={eps} sweep")
    if len(signs) != 1:
        raise InvariantViolation(f"hodge(A ^ zeta) / (A* ^ zeta) is not a constant sign: {signs}")
    s = signs.pop()
    logger.debug("Bridge sign measured", sigma_star=s, samples=2 * samples)
    return s


def random_field_pair(rng: np.random.Generator, epsilon: Optional[int] = None) -> FieldPair:
    """Polynomial plus trigonometric (u, p) for randomized sweeps."""

    def one() -> ScalarField:
        wave = Trigonometric(
            rng.uniform(-1.0, 1.0), rng.uniform(-2.0, 2.0, DIM), rng.uniform(0.0, 2.0 * np.pi),
            kind=str(rng.choice(["sin", "cos"])),
        )
        return Polynomial.random(rng) + wave

    eps = int(rng.choice([-1, 1])) if epsilon is None else epsilon
    return FieldPair(one(), one(), eps)
