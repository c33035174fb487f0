"""
Coordinate-basis exterior algebra on R^4 with signature (-,-,-,+).

Coordinates are ordered (x, y, z, xi) = (x^1, x^2, x^3, x^4) with xi = c*t.
Internally indices are 0-based; printed multi-indices are 1-based.

A k-form stores its C(4, k) components in lexicographic order of strictly
increasing multi-indices. Components may carry trailing batch axes, so a
KForm of shape (C(4, k), *batch) is a whole grid of forms evaluated at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product
from math import comb
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt

from ..core.errors import DegreeError, InvariantViolation
from ..core.logging import get_logger

logger = get_logger(__name__)

DIM = 4
COORDINATES = ("x", "y", "z", "xi")

MultiIndex = Tuple[int, ...]
ArrayLike = Union[float, npt.ArrayLike]
Vector4 = npt.NDArray[np.float64]
"""Contravariant 4-vector, shape (4, *batch)."""


@dataclass(frozen=True)
class MetricSignature:
    """Flat metric eta in the adapted chart."""

    diag: Tuple[int, int, int, int] = (-1, -1, -1, 1)

    def __post_init__(self) -> None:
        if len(self.diag) != DIM or any(s not in (-1, 1) for s in self.diag):
            raise ValueError(f"signature must be four signs, got {self.diag}")

    @property
    def index_eta(self) -> int:
        """Number of minus signs."""
        return sum(1 for s in self.diag if s < 0)

    @property
    def volume_sign(self) -> int:
        """The factor (-1)^{ind eta} of the Hodge defining relation.

        Taken as the sign of det(eta), which does not depend on whether the
        index counts the minus or the plus signs of a 4-dimensional metric
        with an odd number of each.
        """
        return int(np.sign(np.linalg.det(self.matrix)))

    @property
    def matrix(self) -> npt.NDArray[np.float64]:
        return np.diag(np.asarray(self.diag, dtype=float))

    @property
    def inverse(self) -> npt.NDArray[np.float64]:
        return np.linalg.inv(self.matrix)


MINKOWSKI = MetricSignature()


@lru_cache(maxsize=None)
def multi_indices(grade: int) -> Tuple[MultiIndex, ...]:
    """Strictly increasing multi-indices of a grade, lexicographic."""
    if not 0 <= grade <= DIM:
        raise DegreeError(f"grade must lie in 0..{DIM}, got {grade}")
    return tuple(combinations(range(DIM), grade))


@lru_cache(maxsize=None)
def _positions(grade: int) -> Dict[MultiIndex, int]:
    return {idx: pos for pos, idx in enumerate(multi_indices(grade))}


def permutation_sign(seq: Sequence[int]) -> int:
    """Parity of the sorting permutation of seq; 0 when an index repeats."""
    if len(set(seq)) != len(seq):
        return 0
    inversions = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b])
    return -1 if inversions % 2 else 1


def format_multi_index(idx: MultiIndex) -> str:
    return "(" + ",".join(str(i + 1) for i in idx) + ")"


def basis_label(idx: MultiIndex) -> str:
    if not idx:
        return "1"
    return "^".join(f"d{COORDINATES[i]}" for i in idx)


def _lift(components: np.ndarray, batch_ndim: int) -> np.ndarray:
    """Insert unit axes after the component axis up to batch_ndim batch axes."""
    missing = batch_ndim - (components.ndim - 1)
    if missing <= 0:
        return components
    return components.reshape(components.shape[:1] + (1,) * missing + components.shape[1:])


class KForm:
    """Graded antisymmetric covariant tensor with dense components."""

    __slots__ = ("grade", "components")

    def __init__(self, grade: int, components: ArrayLike):
        arr = np.asarray(components, dtype=float)
        if arr.ndim == 0:
            arr = arr.reshape(1)
        expected = comb(DIM, grade) if 0 <= grade <= DIM else -1
        if expected < 0:
            raise DegreeError(f"grade must lie in 0..{DIM}, got {grade}")
        if arr.shape[0] != expected:
            raise DegreeError(
                f"grade {grade} needs {expected} components, got {arr.shape[0]}"
            )
        self.grade = grade
        self.components = arr

    @classmethod
    def zeros(cls, grade: int, batch_shape: Tuple[int, ...] = ()) -> "KForm":
        return cls(grade, np.zeros((comb(DIM, grade),) + tuple(batch_shape)))

    @classmethod
    def basis(cls, indices: Sequence[int], coefficient: ArrayLike = 1.0) -> "KForm":
        """coefficient * dx^{i1} ^ ... ^ dx^{ik}; indices need not be sorted."""
        grade = len(indices)
        sign = permutation_sign(indices)
        coef = np.asarray(coefficient, dtype=float)
        out = cls.zeros(grade, coef.shape)
        if sign:
            out.components[_positions(grade)[tuple(sorted(indices))]] = sign * coef
        return out

    @classmethod
    def from_pairs(cls, grade: int, pairs: Iterable[Tuple[Sequence[int], ArrayLike]]) -> "KForm":
        out = cls.zeros(grade)
        for indices, coef in pairs:
            out = out + cls.basis(indices, coef)
        return out

    @property
    def batch_shape(self) -> Tuple[int, ...]:
        return self.components.shape[1:]

    def __getitem__(self, indices: Sequence[int]) -> np.ndarray:
        """Antisymmetrically extended component F_{i1...ik}."""
        sign = permutation_sign(indices)
        if not sign:
            return np.zeros(self.batch_shape)
        return sign * self.components[_positions(self.grade)[tuple(sorted(indices))]]

    def _combine(self, other: "KForm", op) -> "KForm":
        if other.grade != self.grade:
            raise DegreeError(f"cannot combine grades {self.grade} and {other.grade}")
        ndim = max(self.components.ndim, other.components.ndim) - 1
        return KForm(self.grade, op(_lift(self.components, ndim), _lift(other.components, ndim)))

    def __add__(self, other: "KForm") -> "KForm":
        return self._combine(other, np.add)

    def __sub__(self, other: "KForm") -> "KForm":
        return self._combine(other, np.subtract)

    def __neg__(self) -> "KForm":
        return KForm(self.grade, -self.components)

    def __mul__(self, coefficient: ArrayLike) -> "KForm":
        coef = np.asarray(coefficient, dtype=float)
        comps = _lift(self.components, coef.ndim)
        return KForm(self.grade, comps * coef)

    __rmul__ = __mul__

    def to_tensor(self) -> np.ndarray:
        """Full antisymmetric array of shape (4,)*grade + batch."""
        out = np.zeros((DIM,) * self.grade + self.batch_shape)
        for idx in product(range(DIM), repeat=self.grade):
            sign = permutation_sign(idx)
            if sign:
                out[idx] = sign * self.components[_positions(self.grade)[tuple(sorted(idx))]]
        return out

    @classmethod
    def from_matrix(cls, matrix: ArrayLike) -> "KForm":
        """2-form from an antisymmetric (4, 4, *batch) array (upper triangle read)."""
        m = np.asarray(matrix, dtype=float)
        return cls(2, np.stack([m[i, j] for i, j in multi_indices(2)]))

    def norm_inf(self) -> float:
        return float(np.max(np.abs(self.components))) if self.components.size else 0.0

    def is_close(self, other: "KForm", atol: float = 1e-12) -> bool:
        return self.grade == other.grade and (self - other).norm_inf() <= atol

    def __repr__(self) -> str:
        if self.batch_shape:
            return f"KForm(grade={self.grade}, batch={self.batch_shape})"
        terms = [
            f"{c:+.6g} {basis_label(idx)}"
            for c, idx in zip(self.components, multi_indices(self.grade))
            if c != 0.0
        ]
        return f"KForm({self.grade}: {' '.join(terms) or '0'})"


def unit_volume() -> KForm:
    """omega_o = dx ^ dy ^ dz ^ dxi."""
    return KForm(4, [1.0])


def random_kform(rng: np.random.Generator, grade: int, batch_shape: Tuple[int, ...] = ()) -> KForm:
    return KForm(grade, rng.uniform(-1.0, 1.0, size=(comb(DIM, grade),) + tuple(batch_shape)))


@lru_cache(maxsize=None)
def _wedge_table(ga: int, gb: int) -> Tuple[Tuple[int, int, int, int], ...]:
    out_pos = _positions(ga + gb)
    table = []
    for i, a in enumerate(multi_indices(ga)):
        for j, b in enumerate(multi_indices(gb)):
            sign = permutation_sign(a + b)
            if sign:
                table.append((i, j, out_pos[tuple(sorted(a + b))], sign))
    return tuple(table)


def wedge(a: KForm, b: KForm) -> KForm:
    """Exterior product."""
    if a.grade + b.grade > DIM:
        raise DegreeError(f"wedge of grades {a.grade} and {b.grade} exceeds {DIM}")
    ndim = max(a.components.ndim, b.components.ndim) - 1
    ac, bc = _lift(a.components, ndim), _lift(b.components, ndim)
    batch = np.broadcast_shapes(ac.shape[1:], bc.shape[1:])
    out = np.zeros((comb(DIM, a.grade + b.grade),) + batch)
    for i, j, k, sign in _wedge_table(a.grade, b.grade):
        out[k] += sign * ac[i] * bc[j]
    return KForm(a.grade + b.grade, out)


def wedge_all(*forms: KForm) -> KForm:
    result = forms[0]
    for f in forms[1:]:
        result = wedge(result, f)
    return result


@lru_cache(maxsize=None)
def _gram(grade: int, metric: MetricSignature) -> np.ndarray:
    # eta(dx^I, dx^J) = det[eta^{i_a j_b}] for every pair of basis monomials
    inv = metric.inverse
    idx = multi_indices(grade)
    gram = np.ones((len(idx), len(idx)))
    for p, a in enumerate(idx):
        for q, b in enumerate(idx):
            if grade:
                gram[p, q] = np.linalg.det(inv[np.ix_(a, b)])
    return gram


def metric_pairing(a: KForm, b: KForm, metric: MetricSignature = MINKOWSKI) -> np.ndarray:
    """eta(a, b), extended to k-forms by Gram determinants."""
    if a.grade != b.grade:
        raise DegreeError(f"pairing needs equal grades, got {a.grade} and {b.grade}")
    ndim = max(a.components.ndim, b.components.ndim) - 1
    ac, bc = _lift(a.components, ndim), _lift(b.components, ndim)
    value = np.einsum("i...,ij,j...->...", ac, _gram(a.grade, metric), bc)
    return float(value) if np.ndim(value) == 0 else value


def lower_index(v: ArrayLike, metric: MetricSignature = MINKOWSKI) -> KForm:
    vec = np.asarray(v, dtype=float)
    return KForm(1, np.einsum("ij,j...->i...", metric.matrix, vec))


def raise_index(a: KForm, metric: MetricSignature = MINKOWSKI) -> Vector4:
    if a.grade != 1:
        raise DegreeError(f"raise_index needs a 1-form, got grade {a.grade}")
    return np.einsum("ij,j...->i...", metric.inverse, a.components)


def raise_tensor(t: np.ndarray, rank: int, metric: MetricSignature = MINKOWSKI) -> np.ndarray:
    """Raise the first `rank` (covariant) indices of t with eta^{-1}."""
    inv = metric.inverse
    out = t
    for axis in range(rank):
        out = np.moveaxis(np.tensordot(inv, out, axes=([1], [axis])), 0, axis)
    return out


@dataclass(frozen=True)
class StarTable:
    """Hodge star on basis monomials: source -> (target, sign)."""

    entries: Dict[MultiIndex, Tuple[MultiIndex, int]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def apply(self, a: KForm) -> KForm:
        out = np.zeros((comb(DIM, DIM - a.grade),) + a.batch_shape)
        src_pos = _positions(a.grade)
        dst_pos = _positions(DIM - a.grade)
        for src in multi_indices(a.grade):
            target, sign = self.entries[src]
            out[dst_pos[target]] = sign * a.components[src_pos[src]]
        return KForm(DIM - a.grade, out)

    def double_star_sign(self, grade: int) -> int:
        """Constant s with star(star(b)) = s*b on every basis monomial of a grade."""
        signs = set()
        for src in multi_indices(grade):
            target, s1 = self.entries[src]
            back, s2 = self.entries[target]
            if back != src:
                raise InvariantViolation(f"star does not map {src} back to itself")
            signs.add(s1 * s2)
        if len(signs) != 1:
            raise InvariantViolation(f"double star sign not constant on grade {grade}")
        return signs.pop()

    def lines(self) -> List[str]:
        """One line per basis monomial: `grade multi-index -> sign multi-index`."""
        out = []
        for grade in range(DIM + 1):
            for src in multi_indices(grade):
                target, sign = self.entries[src]
                out.append(
                    f"{grade} {format_multi_index(src)} -> {sign:+d} {format_multi_index(target)}"
                    f"    # *{basis_label(src)} = {'-' if sign < 0 else '+'}{basis_label(target)}"
                )
        return out


def derive_star_table(metric: MetricSignature = MINKOWSKI) -> StarTable:
    """Solve alpha ^ *beta = (-1)^{ind eta} eta(alpha, beta) omega_o on the basis.

    Every candidate monomial and sign is tried against every basis alpha of the
    same grade; exactly one candidate must satisfy all of them.
    """
    omega = unit_volume()
    factor = metric.volume_sign
    entries: Dict[MultiIndex, Tuple[MultiIndex, int]] = {}
    for grade in range(DIM + 1):
        for src in multi_indices(grade):
            beta = KForm.basis(src)
            solutions = []
            for target in multi_indices(DIM - grade):
                for sign in (1, -1):
                    candidate = KForm.basis(target, float(sign))
                    ok = all(
                        wedge(KForm.basis(a), candidate).is_close(
                            omega * (factor * metric_pairing(KForm.basis(a), beta, metric)), 1e-12
                        )
                        for a in multi_indices(grade)
                    )
                    if ok:
                        solutions.append((target, sign))
            if len(solutions) != 1:
                raise InvariantViolation(
                    f"star of {basis_label(src)} has {len(solutions)} solutions"
                )
            entries[src] = solutions[0]
    logger.debug("Star table derived", entries=len(entries), volume_sign=factor)
    return StarTable(entries=entries)


@lru_cache(maxsize=None)
def star_table(metric: MetricSignature = MINKOWSKI) -> StarTable:
    """Derived table, computed once per metric."""
    return derive_star_table(metric)


def hodge(a: KForm, metric: MetricSignature = MINKOWSKI) -> KForm:
    return star_table(metric).apply(a)


def interior_2_3(K: KForm, G: KForm, metric: MetricSignature = MINKOWSKI) -> KForm:
    """i(K^)G = K^{mu nu} G_{mu nu sigma} dx^sigma, summed over mu < nu."""
    if (K.grade, G.grade) != (2, 3):
        raise DegreeError(f"interior_2_3 needs grades (2, 3), got ({K.grade}, {G.grade})")
    ndim = max(K.components.ndim, G.components.ndim) - 1
    k_up = raise_tensor(KForm(2, _lift(K.components, ndim)).to_tensor(), 2, metric)
    g = KForm(3, _lift(G.components, ndim)).to_tensor()
    # the full double sum counts every ordered pair twice
    return KForm(1, 0.5 * np.einsum("ab...,abs...->s...", k_up, g))
