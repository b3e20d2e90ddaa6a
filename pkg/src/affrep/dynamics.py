"""Planar affine maps and their orbit machinery.

The driving object is the map

    Lhat(x, y) = (trA*x - detA*y + a, x)

attached to a parameter triple (trA, detA, a).  Everything the
representation builders need reduces to questions about Lhat: iterates,
closed-form powers, fixed points, periodic orbits, k-strings (orbits from
the r-axis to the s-axis through the positive quadrant) and the
trigonometric / hyperbolic parametrizations of its invariant curves.

All functions are pure; values are immutable after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import (
    CoordinateOverflow,
    DomainError,
    NotInvertible,
    SingularSystem,
    UnsupportedBranch,
)

# Default tolerances; every consumer can override them per call.
ORBIT_TOL = 1e-8        # orbit / period matching
LINALG_TOL = 1e-10      # exact linear-algebra residuals
MAGNITUDE_BOUND = 1e12  # guard against divergent iteration


@dataclass(frozen=True)
class AffineMap2:
    """An affine map x -> A x + t on the plane, stored entrywise."""

    a11: float
    a12: float
    a21: float
    a22: float
    t1: float = 0.0
    t2: float = 0.0

    def __post_init__(self):
        for name in ("a11", "a12", "a21", "a22", "t1", "t2"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"non-finite entry {name}")

    @classmethod
    def from_arrays(cls, matrix, translation=(0.0, 0.0)) -> "AffineMap2":
        m = np.asarray(matrix, dtype=float)
        t = np.asarray(translation, dtype=float)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1], t[0], t[1])

    @classmethod
    def identity(cls) -> "AffineMap2":
        return cls(1.0, 0.0, 0.0, 1.0, 0.0, 0.0)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]])

    @property
    def translation(self) -> np.ndarray:
        return np.array([self.t1, self.t2])

    @property
    def trace(self) -> float:
        return self.a11 + self.a22

    @property
    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a21

    def __call__(self, point) -> np.ndarray:
        x, y = float(point[0]), float(point[1])
        return np.array(
            [self.a11 * x + self.a12 * y + self.t1,
             self.a21 * x + self.a22 * y + self.t2]
        )

    def compose(self, other: "AffineMap2") -> "AffineMap2":
        """Return self after other, i.e. x -> self(other(x))."""
        m = self.matrix @ other.matrix
        t = self.matrix @ other.translation + self.translation
        return AffineMap2.from_arrays(m, t)

    def inverse(self) -> "AffineMap2":
        if self.det == 0.0:
            raise NotInvertible("det A = 0")
        minv = np.linalg.inv(self.matrix)
        return AffineMap2.from_arrays(minv, -minv @ self.translation)


@dataclass(frozen=True)
class AlgebraParams:
    """Parameters (trA, detA, a) identifying an algebra, plus the optional
    central-element value chat1 that pins down a constraint curve."""

    trA: float
    detA: float
    a: float
    chat1: Optional[float] = None

    def __post_init__(self):
        for name in ("trA", "detA", "a"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"non-finite parameter {name}")

    @property
    def delta_alg(self) -> float:
        """1 + detA - trA; det(A - I) for any matrix with this trace/det."""
        return 1.0 + self.detA - self.trA

    @property
    def delta(self) -> float:
        """2 - trA; equals delta_alg when detA = 1 (the only regime using it)."""
        return 2.0 - self.trA

    @property
    def mu(self) -> float:
        """Diagonal fixed-point coordinate a / (2 - trA); needs detA=1, trA!=2."""
        if self.trA == 2.0:
            raise DomainError("mu undefined for trA = 2")
        return self.a / self.delta

    @property
    def chat(self) -> float:
        """mu^2 + chat1 / Delta; requires chat1 and trA != 2."""
        if self.chat1 is None:
            raise DomainError("chat requires chat1")
        return self.mu ** 2 + self.chat1 / self.delta

    @property
    def theta_elliptic(self) -> float:
        """theta in (0, pi/2) with trA = 2 cos 2*theta; requires |trA| < 2."""
        if not -2.0 < self.trA < 2.0:
            raise DomainError("elliptic theta requires |trA| < 2")
        return math.acos(self.trA / 2.0) / 2.0

    @property
    def theta_hyperbolic(self) -> float:
        """theta > 0 with trA = 2 cosh 2*theta; requires trA > 2."""
        if not self.trA > 2.0:
            raise DomainError("hyperbolic theta requires trA > 2")
        return math.acosh(self.trA / 2.0) / 2.0

    def with_chat1(self, chat1: float) -> "AlgebraParams":
        return replace(self, chat1=chat1)


@dataclass(frozen=True)
class OrbitSegment:
    """An ordered run of (d, dtilde) points linked by Lhat.

    kind is one of "loop", "string", "forward-ray", "two-sided-window".
    """

    points: np.ndarray
    kind: str

    def __post_init__(self):
        object.__setattr__(self, "points", np.asarray(self.points, dtype=float))
        if self.points.ndim != 2 or self.points.shape[1] != 2:
            raise DomainError("orbit points must be an (n, 2) array")

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def dtilde(self) -> np.ndarray:
        return self.points[:, 1]


def lhat_from_params(params: AlgebraParams) -> AffineMap2:
    """The map (x, y) -> (trA*x - detA*y + a, x)."""
    return AffineMap2(params.trA, -params.detA, 1.0, 0.0, params.a, 0.0)


def iterate(m: AffineMap2, x0, n: int, bound: float = MAGNITUDE_BOUND) -> np.ndarray:
    """Apply m to x0 n times.  Raises CoordinateOverflow past the bound."""
    if n < 0:
        raise DomainError("n must be >= 0")
    x = np.asarray(x0, dtype=float)
    for k in range(n):
        x = m(x)
        if np.max(np.abs(x)) > bound:
            raise CoordinateOverflow(k + 1, float(np.max(np.abs(x))), bound)
    return x


def orbit_points(m: AffineMap2, x0, n: int, bound: float = MAGNITUDE_BOUND) -> np.ndarray:
    """x0, m(x0), ..., m^n(x0) as an (n+1, 2) array."""
    pts = np.empty((n + 1, 2))
    pts[0] = np.asarray(x0, dtype=float)
    for k in range(n):
        pts[k + 1] = m(pts[k])
        if np.max(np.abs(pts[k + 1])) > bound:
            raise CoordinateOverflow(k + 1, float(np.max(np.abs(pts[k + 1]))), bound)
    return pts


def affine_power(m: AffineMap2, n: int) -> AffineMap2:
    """m composed with itself n times, by repeated composition."""
    if n < 0:
        raise DomainError("n must be >= 0")
    result = AffineMap2.identity()
    for _ in range(n):
        result = m.compose(result)
    return result


def power_closed_form(params: AlgebraParams, n: int) -> AffineMap2:
    """Closed form for the n-th power of Lhat.

    Generic branch: (trA)^2 != 4 detA and trA != 1 + detA, via the
    eigenvalues lambda_pm of the linear part.  Parabolic branch: detA = 1,
    trA = 2.  Anything else raises UnsupportedBranch (callers fall back to
    repeated application).
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    t, q, a = params.trA, params.detA, params.a

    if q == 1.0 and t == 2.0:
        m = np.array([[1.0 + n, -float(n)], [float(n), 1.0 - n]])
        tr = (a * n / 2.0) * np.array([n + 1.0, n - 1.0])
        return AffineMap2.from_arrays(m, tr)

    disc = t * t - 4.0 * q
    if disc == 0.0 or params.delta_alg == 0.0:
        raise UnsupportedBranch(
            "closed form needs (trA)^2 != 4 detA and trA != 1 + detA, "
            "or detA = 1 with trA = 2"
        )

    lp = (t + complex(disc) ** 0.5) / 2.0
    lm = (t - complex(disc) ** 0.5) / 2.0
    dl = lp - lm
    mat = np.array(
        [[lp ** (n + 1) - lm ** (n + 1), -q * (lp ** n - lm ** n)],
         [lp ** n - lm ** n, -q * (lp ** (n - 1) - lm ** (n - 1))]]
    ) / dl
    fp = (1.0 - lp ** n) / (1.0 - lp)
    fm = (1.0 - lm ** n) / (1.0 - lm)
    tr = (a / dl) * np.array([lp * fp - lm * fm, fp - fm])
    return AffineMap2.from_arrays(mat.real, tr.real)


@dataclass(frozen=True)
class EigenFixed:
    """Eigenvalues of the linear part plus the fixed-point structure.

    kind: "point" (unique fixed point), "line" (fixed_line = (point,
    direction)), "plane" (every point fixed), or "none".
    """

    eigenvalues: tuple
    kind: str
    fixed_point: Optional[tuple] = None
    fixed_line: Optional[tuple] = None


def eigen_and_fixed(m: AffineMap2, tol: float = 1e-12) -> EigenFixed:
    """Eigenvalues and fixed set of an affine map."""
    ev = np.linalg.eigvals(m.matrix)
    ev = tuple(complex(v) for v in ev)
    ia = np.eye(2) - m.matrix
    t = m.translation
    det_ia = ia[0, 0] * ia[1, 1] - ia[0, 1] * ia[1, 0]
    scale = np.max(np.abs(ia)) + 1.0
    if abs(det_ia) > tol * scale * scale:
        x = np.linalg.solve(ia, t)
        return EigenFixed(ev, "point", fixed_point=(float(x[0]), float(x[1])))
    if np.max(np.abs(ia)) <= tol:
        # linear part is the identity
        if np.max(np.abs(t)) <= tol:
            return EigenFixed(ev, "plane")
        return EigenFixed(ev, "none")
    # rank-1 case: a line of fixed points if the system is consistent
    x, residuals, rank, _ = np.linalg.lstsq(ia, t, rcond=None)
    resid = np.max(np.abs(ia @ x - t))
    if resid > tol * (1.0 + np.max(np.abs(t))):
        return EigenFixed(ev, "none")
    _, _, vt = np.linalg.svd(ia)
    direction = vt[-1]
    return EigenFixed(
        ev,
        "line",
        fixed_line=((float(x[0]), float(x[1])), (float(direction[0]), float(direction[1]))),
    )


def find_periodic_orbit(
    params: AlgebraParams,
    x0,
    nmax: int,
    tol: float = ORBIT_TOL,
    bound: float = MAGNITUDE_BOUND,
) -> Optional[tuple]:
    """Smallest period k <= nmax with |Lhat^k(x0) - x0| < tol, with its orbit.

    Returns (k, OrbitSegment) or None.  The reported period is minimal, so
    divisor periods collapse.
    """
    if nmax < 1:
        raise DomainError("nmax must be >= 1")
    m = lhat_from_params(params)
    x0 = np.asarray(x0, dtype=float)
    pts = [x0]
    x = x0
    for k in range(1, nmax + 1):
        try:
            x = m(x)
        except CoordinateOverflow:
            return None
        if np.max(np.abs(x)) > bound:
            return None
        if float(np.hypot(*(x - x0))) < tol:
            return k, OrbitSegment(np.array(pts), "loop")
        pts.append(x)
    return None


def find_kstring(
    params: AlgebraParams, n: int, tol: float = LINALG_TOL
) -> Optional[OrbitSegment]:
    """The n-vertex string orbit (x, 0) -> ... -> (0, y), if one exists.

    Solves the linear condition "first coordinate of Lhat^(n-1)(x, 0) = 0"
    for x, then keeps the orbit only when x > 0, the terminal second
    coordinate is > 0, and every interior point is strictly positive.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if params.detA == 0.0:
        raise NotInvertible("k-strings require detA != 0")
    if n == 1:
        # a 1-string forces (x, 0) = (0, y), i.e. the origin; never a
        # positive string
        return None
    m = lhat_from_params(params)
    power = affine_power(m, n - 1)
    coeff = power.a11
    scale = np.max(np.abs(power.matrix)) + abs(power.t1) + 1.0
    if abs(coeff) <= tol * scale:
        raise SingularSystem(f"coefficient of x vanishes for n = {n}")
    x = -power.t1 / coeff
    if not x > tol:
        return None
    pts = orbit_points(m, (x, 0.0), n - 1)
    if not pts[-1, 1] > tol:
        return None
    interior = pts[1:-1]
    if interior.size and not np.all(interior > tol):
        return None
    return OrbitSegment(pts, "string")


def string_start_hyperbolic(params: AlgebraParams, n: int) -> float:
    """Closed-form string start x = 2 mu sinh(theta) sinh((n-1) theta) / cosh(n theta).

    Valid for detA = 1, trA = 2 cosh 2*theta; the independent check against
    the linear solve in find_kstring lives in the tests.
    """
    th = params.theta_hyperbolic
    return 2.0 * params.mu * math.sinh(th) * math.sinh((n - 1) * th) / math.cosh(n * th)


def _curve_point(params: AlgebraParams, beta: float, branch: int, hyperbolic: bool) -> np.ndarray:
    mu = params.mu
    root = math.sqrt(params.chat)
    sign = 1.0 if branch == 1 else -1.0
    if hyperbolic:
        th = params.theta_hyperbolic
        f, ct = math.cosh, math.cosh(th)
    else:
        th = params.theta_elliptic
        f, ct = math.cos, math.cos(th)
    return np.array(
        [mu + sign * root * f(beta) / ct, mu + sign * root * f(beta - 2.0 * th) / ct]
    )


def hyperbolic_parametrization(params: AlgebraParams, beta: float, branch: int) -> np.ndarray:
    """Point x_branch(beta) on the invariant curve for trA = 2 cosh 2*theta.

    Satisfies Lhat(x_i(beta)) = x_i(beta + 2*theta).  Requires detA = 1,
    chat > 0, trA > 2.
    """
    if branch not in (1, 2):
        raise DomainError("branch must be 1 or 2")
    if params.detA != 1.0:
        raise DomainError("parametrization requires detA = 1")
    if params.trA <= 2.0:
        raise DomainError("hyperbolic parametrization requires trA > 2")
    if not params.chat > 0.0:
        raise DomainError("parametrization requires chat > 0")
    return _curve_point(params, beta, branch, hyperbolic=True)


def elliptic_parametrization(params: AlgebraParams, beta: float) -> np.ndarray:
    """Point x(beta) on the invariant ellipse for |trA| < 2.

    Same shift property as the hyperbolic case with cos in place of cosh;
    beta -> beta + 2*theta is a rotation step along the ellipse.  The
    second branch is the same curve shifted by pi.
    """
    if params.detA != 1.0:
        raise DomainError("parametrization requires detA = 1")
    if not -2.0 < params.trA < 2.0:
        raise DomainError("elliptic parametrization requires |trA| < 2")
    if not params.chat > 0.0:
        raise DomainError("parametrization requires chat > 0")
    return _curve_point(params, beta, 1, hyperbolic=False)
