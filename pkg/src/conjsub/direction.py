"""Smallest-norm point of a two-point hull, and checks built on it.

The conjugate subgradient direction is updated as the point of the
segment ``[p, g]`` nearest to the origin.  The remaining helpers verify
two properties of such directions numerically: the norm decay bound of
the recursion when new subgradients make an obtuse-enough angle with the
current direction, and the deviation estimate for convex combinations of
subgradients taken in a ball.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import DimensionError

__all__ = [
    "nr_conv2",
    "BoundCheck",
    "lemma22_bound_check",
    "ConvexCertificate",
    "lemma23_check",
]


def nr_conv2(p: np.ndarray, g: np.ndarray) -> tuple[np.ndarray, float]:
    """Point of the segment between `p` and `g` nearest to the origin.

    Returns ``(p + t (g - p), t)`` with ``t`` in [0, 1].  When ``p == g``
    the segment is a single point and ``(p, 0.0)`` is returned.
    """
    p = np.asarray(p, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if p.shape != g.shape:
        raise DimensionError(f"dimension mismatch: {p.shape} vs {g.shape}")
    q = p - g
    qq = float(np.dot(q, q))
    if qq == 0.0:
        return p.copy(), 0.0
    t = min(1.0, max(0.0, float(np.dot(p, q)) / qq))
    return p - t * q, t


class BoundCheck(enum.Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    INAPPLICABLE = "inapplicable"

    def __bool__(self) -> bool:
        return self is BoundCheck.HOLDS


def lemma22_bound_check(g_seq: Sequence[np.ndarray], theta: float) -> BoundCheck:
    """Check ``||p^i|| <= C / ((1 - theta) sqrt(i + 1))`` along the recursion.

    ``p^0 = g^0`` and ``p^{i+1} = nr_conv2(p^i, g^{i+1})``, with ``C`` the
    largest subgradient norm in `g_seq`.  The bound is only claimed when
    every new element satisfies ``<g^{i+1}, p^i> <= theta ||p^i||^2``; if
    that fails somewhere the result is ``INAPPLICABLE`` rather than
    ``VIOLATED``.
    """
    if not 0.0 < theta < 1.0:
        raise ValueError("theta must lie in (0, 1)")
    gs = [np.asarray(g, dtype=np.float64) for g in g_seq]
    if not gs:
        return BoundCheck.HOLDS
    C = math.sqrt(max(float(np.dot(g, g)) for g in gs))
    scale = C / (1.0 - theta)
    p = gs[0]
    pp = float(np.dot(p, p))
    norms = [math.sqrt(pp)]
    for g in gs[1:]:
        if float(np.dot(g, p)) > theta * pp:
            return BoundCheck.INAPPLICABLE
        p, _ = nr_conv2(p, g)
        pp = float(np.dot(p, p))
        norms.append(math.sqrt(pp))
    for i, pn in enumerate(norms):
        # relative slack for the rounding in the recursion itself
        if not pn <= scale / math.sqrt(i + 1) * (1 + 1e-12):
            return BoundCheck.VIOLATED
    return BoundCheck.HOLDS


@dataclass(frozen=True)
class ConvexCertificate:
    """Convex combination of subgradients, each tagged with where it was taken.

    ``atoms`` holds ``(weight, subgradient, eval_point)`` triples.
    """

    atoms: tuple[tuple[float, np.ndarray, np.ndarray], ...]

    @classmethod
    def single(cls, g: np.ndarray, point: np.ndarray) -> "ConvexCertificate":
        return cls(((1.0, np.array(g, dtype=np.float64), np.array(point, dtype=np.float64)),))

    def merge(self, t: float, g: np.ndarray, point: np.ndarray) -> "ConvexCertificate":
        """Certificate for ``(1 - t) * self + t * g``, mirroring :func:`nr_conv2`."""
        atoms = tuple((w * (1.0 - t), gg, yy) for w, gg, yy in self.atoms if t < 1.0)
        if t > 0.0:
            atoms += ((t, np.array(g, dtype=np.float64), np.array(point, dtype=np.float64)),)
        return ConvexCertificate(atoms)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _, _ in self.atoms])

    def combination(self) -> np.ndarray:
        return sum(w * g for w, g, _ in self.atoms)

    def radius(self, center: np.ndarray) -> float:
        return max(float(np.linalg.norm(y - center)) for _, _, y in self.atoms)

    def is_valid(self, tol: float = 1e-12) -> bool:
        w = self.weights
        return bool(np.all(w >= 0.0)) and abs(float(w.sum()) - 1.0) <= tol


def lemma23_check(
    certificate: ConvexCertificate,
    center: np.ndarray,
    delta: float,
    probe_points: Iterable[np.ndarray],
    f_value: Callable[[np.ndarray], float],
    tol: float = 1e-10,
) -> bool:
    """Check the deviation estimate for a convex combination of subgradients.

    With ``p = sum mu_j g^j``, ``g^j`` a subgradient at ``y^j`` and every
    ``y^j`` within `delta` of `center`, each probe ``y`` must satisfy::

        f(y) - sum mu_j f(y^j) >= <p, y - center> - delta * max_j ||g^j||

    `tol` is an absolute slack for rounding, scaled by the magnitude of
    the terms involved.
    """
    center = np.asarray(center, dtype=np.float64)
    if not certificate.is_valid():
        raise ValueError("certificate weights must be non-negative and sum to 1")
    for _, _, y in certificate.atoms:
        if np.linalg.norm(y - center) > delta * (1 + 1e-12) + 1e-15:
            raise ValueError(f"atom point {y} lies outside the ball of radius {delta}")
    p = certificate.combination()
    L = max(float(np.linalg.norm(g)) for _, g, _ in certificate.atoms)
    mixed = sum(w * f_value(y) for w, _, y in certificate.atoms)
    for y in probe_points:
        y = np.asarray(y, dtype=np.float64)
        fy = f_value(y)
        lhs = fy - mixed
        rhs = float(np.dot(p, y - center)) - delta * L
        slack = tol * max(1.0, abs(fy), abs(mixed))
        if lhs < rhs - slack:
            return False
    return True
