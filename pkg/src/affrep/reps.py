"""Explicit matrix representations built from orbits of Lhat.

A representation here is a complex matrix W (with V = W^dagger implied)
whose digraph is a cycle (loop), a path (string), or a truncated ray /
window for the infinite one- and two-sided families.  D = W W^dagger and
Dtilde = W^dagger W are diagonal and their entries trace out the orbit.

Truncated windows cannot satisfy the relations at their cut edges; those
boundary rows and columns are masked and the defect is reported
separately (boundary_max in the relation report).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .dynamics import (
    AlgebraParams,
    OrbitSegment,
    ORBIT_TOL,
    LINALG_TOL,
    affine_power,
    find_kstring,
    iterate,
    lhat_from_params,
    orbit_points,
)
from .errors import (
    DomainError,
    NoString,
    NotInvertible,
    NotPeriodic,
    OrbitLeavesPositiveQuadrant,
    UnsupportedCase,
)


@dataclass(frozen=True)
class Representation:
    kind: str                  # loop | string | one-sided-truncated |
                               # two-sided-truncated | scalar
    dim: int
    W: np.ndarray
    orbit: OrbitSegment
    params: AlgebraParams
    beta: Optional[float] = None
    clamped: Tuple[int, ...] = ()  # orbit indices whose tiny negative d was zeroed

    @property
    def V(self) -> np.ndarray:
        return self.W.conj().T

    @property
    def D(self) -> np.ndarray:
        return self.W @ self.V

    @property
    def Dtilde(self) -> np.ndarray:
        return self.V @ self.W

    @property
    def boundary_indices(self) -> Tuple[int, ...]:
        if self.kind == "one-sided-truncated":
            return (self.dim - 1,)
        if self.kind == "two-sided-truncated":
            return (0, self.dim - 1)
        return ()


@dataclass(frozen=True)
class RelationReport:
    residual_cdef1: float
    residual_cdef2: float
    residual_commute_DDt: float
    residual_DW_WDt: float
    casimir_value: Optional[float] = None
    casimir_residual: Optional[float] = None
    boundary_max: Optional[float] = None

    def max_residual(self) -> float:
        return max(
            self.residual_cdef1,
            self.residual_cdef2,
            self.residual_commute_DDt,
            self.residual_DW_WDt,
        )


def _sqrt_clamped(values: np.ndarray, tol: float) -> Tuple[np.ndarray, Tuple[int, ...]]:
    """Nonnegative square roots; entries in [-tol, 0) are clamped to zero."""
    values = np.asarray(values, dtype=float)
    clamped = tuple(int(i) for i in np.nonzero((values < 0) & (values >= -tol))[0])
    fixed = values.copy()
    fixed[list(clamped)] = 0.0
    if np.any(fixed < 0):
        bad = int(np.nonzero(fixed < 0)[0][0])
        raise DomainError(f"negative orbit coordinate at index {bad}: {values[bad]}")
    return np.sqrt(fixed), clamped


def _strictly_positive(points: np.ndarray, start_index: int = 0):
    """Index of the first point not strictly inside the positive quadrant."""
    for k, pt in enumerate(points):
        if not (pt[0] > 0.0 and pt[1] > 0.0):
            return start_index + k, pt
    return None


def build_loop(
    params: AlgebraParams,
    x1,
    n: int,
    beta: float = 0.0,
    tol: float = ORBIT_TOL,
) -> Representation:
    """Loop representation over the period-n orbit of x1.

    W carries sqrt(d_1)..sqrt(d_{n-1}) on the superdiagonal and
    e^{i beta} sqrt(d_n) in the corner.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    m = lhat_from_params(params)
    pts = orbit_points(m, x1, n)
    closure = float(np.hypot(*(pts[n] - pts[0])))
    if closure >= tol:
        raise NotPeriodic(f"|Lhat^{n}(x1) - x1| = {closure:.3e} >= tol = {tol:.1e}")
    bad = _strictly_positive(pts[:n])
    if bad is not None:
        raise OrbitLeavesPositiveQuadrant(bad[0], bad[1])
    roots, clamped = _sqrt_clamped(pts[:n, 0], tol)
    w = np.zeros((n, n), dtype=complex)
    for k in range(n - 1):
        w[k, k + 1] = roots[k]
    w[n - 1, 0] = np.exp(1j * beta) * roots[n - 1]
    kind = "scalar" if n == 1 else "loop"
    return Representation(kind, n, w, OrbitSegment(pts[:n], "loop"), params, beta, clamped)


def build_string(params: AlgebraParams, n: int, tol: float = LINALG_TOL) -> Representation:
    """String representation on the n-vertex string orbit, if it exists."""
    if n < 2:
        raise DomainError("strings need n >= 2")
    segment = find_kstring(params, n, tol)
    if segment is None:
        raise NoString(_no_string_reason(params, n))
    roots, clamped = _sqrt_clamped(segment.points[: n - 1, 0], tol)
    w = np.zeros((n, n), dtype=complex)
    for k in range(n - 1):
        w[k, k + 1] = roots[k]
    return Representation("string", n, w, segment, params, None, clamped)


def _no_string_reason(params: AlgebraParams, n: int) -> str:
    if params.detA == 1.0 and params.delta <= 0.0 and params.a >= 0.0:
        return (
            f"no {n}-string: for detA = 1, trA >= 2 and a >= 0 there are no "
            "positive solutions of Lhat^(n-1)(x, 0) = (0, y)"
        )
    return f"no {n}-string with positive endpoints and interior exists"


def build_one_sided(
    params: AlgebraParams,
    d0: float,
    N: int,
    mirrored: bool = False,
    tol: float = ORBIT_TOL,
) -> Representation:
    """(N+1)-dimensional truncation of the one-sided representation seeded
    at (d0, 0).

    With mirrored=True the window is built on the reflected orbit ending at
    (0, d0) (the reflection swap (r, s) -> (s, r) conjugates Lhat into its
    inverse), which is the transpose matrix; it is the second, inequivalent
    one-sided family.
    """
    if N < 0:
        raise DomainError("N must be >= 0")
    if not d0 > 0.0:
        raise DomainError("d0 must be > 0")
    m = lhat_from_params(params)
    pts = orbit_points(m, (d0, 0.0), N)
    bad = _strictly_positive(pts[1:], start_index=1)
    if bad is not None:
        raise OrbitLeavesPositiveQuadrant(bad[0], bad[1])
    roots, clamped = _sqrt_clamped(pts[:-1, 0], tol) if N > 0 else (np.zeros(0), ())
    w = np.zeros((N + 1, N + 1), dtype=complex)
    for k in range(N):
        w[k, k + 1] = roots[k]
    orbit = pts
    if mirrored:
        w = w.T.copy()
        orbit = pts[:, ::-1].copy()
    return Representation(
        "one-sided-truncated", N + 1, w,
        OrbitSegment(orbit, "forward-ray"), params, None, clamped,
    )


def build_two_sided(
    params: AlgebraParams,
    x0,
    N: int,
    tol: float = ORBIT_TOL,
) -> Representation:
    """(2N+1)-dimensional window of the two-sided representation centered
    at x0, with equal forward and backward depth."""
    if N < 0:
        raise DomainError("N must be >= 0")
    if params.detA == 0.0:
        raise NotInvertible("two-sided representations need an invertible map")
    m = lhat_from_params(params)
    minv = m.inverse()
    x0 = np.asarray(x0, dtype=float)
    fwd = orbit_points(m, x0, N)
    bwd = orbit_points(minv, x0, N)
    pts = np.vstack([bwd[::-1], fwd[1:]])  # indices k = -N .. N
    for k in range(2 * N + 1):
        pt = pts[k]
        if not (pt[0] > 0.0 and pt[1] > 0.0):
            raise OrbitLeavesPositiveQuadrant(k - N, pt)
    roots, clamped = _sqrt_clamped(pts[:-1, 0], tol) if N > 0 else (np.zeros(0), ())
    dim = 2 * N + 1
    w = np.zeros((dim, dim), dtype=complex)
    for k in range(dim - 1):
        w[k, k + 1] = roots[k]
    return Representation(
        "two-sided-truncated", dim, w,
        OrbitSegment(pts, "two-sided-window"), params, None, clamped,
    )


def _masked_max(mat: np.ndarray, masked: Tuple[int, ...]) -> Tuple[float, float]:
    """(interior max |entry|, boundary max |entry|) after masking the given
    row and column indices."""
    a = np.abs(mat)
    if not masked:
        return float(a.max()) if a.size else 0.0, 0.0
    keep = np.ones(a.shape[0], dtype=bool)
    keep[list(masked)] = False
    interior = a[np.ix_(keep, keep)]
    boundary = a.copy()
    boundary[np.ix_(keep, keep)] = 0.0
    imax = float(interior.max()) if interior.size else 0.0
    return imax, float(boundary.max())


def verify_relations(rep: Representation, tol: float = LINALG_TOL) -> RelationReport:
    """Max-entry residuals of the defining relations in this representation.

    For truncated windows the boundary rows/columns are masked out of the
    four headline residuals and their worst entry lands in boundary_max.
    """
    w = rep.W
    v = rep.V
    p = rep.params
    d = rep.D
    dt = rep.Dtilde
    r1 = w @ w @ v - p.a * w + p.detA * (v @ w @ w) - p.trA * (w @ v @ w)
    r2 = w @ v @ v - p.a * v + p.detA * (v @ v @ w) - p.trA * (v @ w @ v)
    r3 = d @ dt - dt @ d
    r4 = d @ w - w @ dt
    masked = rep.boundary_indices
    vals = []
    bmax = 0.0
    for r in (r1, r2, r3, r4):
        interior, boundary = _masked_max(r, masked)
        vals.append(interior)
        bmax = max(bmax, boundary)
    cas_value = cas_resid = None
    if p.detA == 1.0:
        c = _casimir_matrix(p, d, dt)
        diag = np.real(np.diag(c))
        keep = [i for i in range(rep.dim) if i not in masked]
        if keep:
            mean = float(np.mean(diag[keep]))
            cas_value = mean
            cas_resid, cas_b = _masked_max(c - mean * np.eye(rep.dim), masked)
            bmax = max(bmax, cas_b) if masked else bmax
    return RelationReport(
        vals[0], vals[1], vals[2], vals[3],
        casimir_value=cas_value,
        casimir_residual=cas_resid,
        boundary_max=bmax if masked else None,
    )


def _casimir_matrix(p: AlgebraParams, d: np.ndarray, dt: np.ndarray) -> np.ndarray:
    s = d + dt
    q = d - dt
    return -4.0 * p.a * s + (2.0 - p.trA) * (s @ s) + (2.0 + p.trA) * (q @ q)


@dataclass(frozen=True)
class CasimirReport:
    matrix_diagonal: np.ndarray
    proportional: bool
    chat1: Optional[float]
    commute_residual: float


def casimir(rep: Representation, rst: Optional[Tuple[float, float, float]] = None,
            tol: float = 1e-8) -> CasimirReport:
    """Evaluate the central element in this representation.

    detA = 1: the fixed combination with coefficients (-4a, 2-trA, 2+trA);
    chat1 is mean/4 when the diagonal is constant.  detA = -1 with trA = 0
    and a = 0: any (r, s, t) combination is central; pass rst to pick one
    (default (1, 1, 1)).  Anything else raises UnsupportedCase.
    """
    p = rep.params
    d, dt = rep.D, rep.Dtilde
    s, q = d + dt, d - dt
    if p.detA == 1.0:
        c = _casimir_matrix(p, d, dt)
    elif p.detA == -1.0 and p.trA == 0.0 and p.a == 0.0:
        r_, s_, t_ = rst if rst is not None else (1.0, 1.0, 1.0)
        c = r_ * s + s_ * (s @ s) + t_ * (q @ q)
    else:
        raise UnsupportedCase(
            "central element needs detA = 1, or detA = -1 with trA = 0 and a = 0"
        )
    diag = np.real(np.diag(c))
    mean = float(np.mean(diag))
    spread = float(np.max(np.abs(diag - mean))) if diag.size else 0.0
    off = c - np.diag(np.diag(c))
    proportional = spread <= tol * (1.0 + abs(mean)) and float(np.abs(off).max()) <= tol
    chat1 = mean / 4.0 if (proportional and p.detA == 1.0) else None
    commute = float(np.abs(c @ rep.W - rep.W @ c).max())
    return CasimirReport(diag, proportional, chat1, commute)


@dataclass(frozen=True)
class XYZRealization:
    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    hermitian_residual: float
    casimir_xyz_residual: float


def xyz_realization(rep: Representation, hbar: float) -> XYZRealization:
    """Hermitian triple X = (W+V)/2, Y = (W-V)/2i, Z = [X, Y]/(i hbar), and
    the residual between the two forms of the central element."""
    if hbar == 0.0:
        raise DomainError("hbar must be nonzero")
    w, v = rep.W, rep.V
    x = (w + v) / 2.0
    y = (w - v) / 2.0j
    z = (x @ y - y @ x) / (1j * hbar)
    herm = max(
        float(np.abs(x - x.conj().T).max()),
        float(np.abs(y - y.conj().T).max()),
        float(np.abs(z - z.conj().T).max()),
    )
    p = rep.params
    xy2 = x @ x + y @ y
    c_xyz = (
        -8.0 * p.a * xy2
        + 4.0 * (2.0 - p.trA) * (xy2 @ xy2)
        + 4.0 * hbar ** 2 * (2.0 + p.trA) * (z @ z)
    )
    c_dd = _casimir_matrix(p, rep.D, rep.Dtilde)
    resid = float(np.abs(c_xyz - c_dd).max())
    return XYZRealization(x, y, z, herm, resid)


def reorder_check(rep: Representation, degree: int = 3, n: int = 4) -> float:
    """Max residual of W^k p(D, Dt) = p(Lhat^k(D, Dt)) W^k over monomials
    p = D^i Dt^j with i + j <= degree and powers k <= n.

    For truncated windows, indices within k of a cut edge are masked.
    """
    p = rep.params
    m = lhat_from_params(p)
    d, dt = rep.D, rep.Dtilde
    dim = rep.dim
    worst = 0.0
    wk = np.eye(dim, dtype=complex)
    for k in range(1, n + 1):
        wk = wk @ rep.W
        power = affine_power(m, k)
        d_img = power.a11 * d + power.a12 * dt + power.t1 * np.eye(dim)
        dt_img = power.a21 * d + power.a22 * dt + power.t2 * np.eye(dim)
        masked = _spread_boundary(rep, k)
        for i in range(degree + 1):
            for j in range(degree + 1 - i):
                lhs = wk @ _matpow(d, i) @ _matpow(dt, j)
                rhs = _matpow(d_img, i) @ _matpow(dt_img, j) @ wk
                interior, _ = _masked_max(lhs - rhs, masked)
                worst = max(worst, interior)
    return worst


def _spread_boundary(rep: Representation, k: int) -> Tuple[int, ...]:
    """Boundary indices widened by k steps (the defect of W^k reaches that far)."""
    if rep.kind == "one-sided-truncated":
        return tuple(range(max(rep.dim - 1 - k, 0), rep.dim))
    if rep.kind == "two-sided-truncated":
        lo = tuple(range(0, min(k + 1, rep.dim)))
        hi = tuple(range(max(rep.dim - 1 - k, 0), rep.dim))
        return tuple(sorted(set(lo + hi)))
    return ()


def _matpow(mat: np.ndarray, k: int) -> np.ndarray:
    out = np.eye(mat.shape[0], dtype=complex)
    for _ in range(k):
        out = out @ mat
    return out


# -- JSON round trip ---------------------------------------------------------

def rep_to_dict(rep: Representation, report: Optional[RelationReport] = None) -> dict:
    """JSON-friendly form: kind, dim, beta, orbit, W (re/im), params, report."""
    if report is None:
        report = verify_relations(rep)
    doc = {
        "kind": rep.kind,
        "dim": rep.dim,
        "beta": rep.beta,
        "orbit": [[float(a), float(b)] for a, b in rep.orbit.points],
        "W": {
            "re": rep.W.real.tolist(),
            "im": rep.W.imag.tolist(),
        },
        "params": {
            "trA": rep.params.trA,
            "detA": rep.params.detA,
            "a": rep.params.a,
            "chat1": rep.params.chat1,
        },
        "report": {
            "residual_cdef1": report.residual_cdef1,
            "residual_cdef2": report.residual_cdef2,
            "residual_commute_DDt": report.residual_commute_DDt,
            "residual_DW_WDt": report.residual_DW_WDt,
            "casimir_value": report.casimir_value,
            "casimir_residual": report.casimir_residual,
            "boundary_max": report.boundary_max,
        },
    }
    return doc


def rep_from_dict(doc: dict) -> Representation:
    w = np.array(doc["W"]["re"], dtype=float) + 1j * np.array(doc["W"]["im"], dtype=float)
    pd = doc["params"]
    params = AlgebraParams(pd["trA"], pd["detA"], pd["a"], pd.get("chat1"))
    kind = doc["kind"]
    orbit_kind = {
        "loop": "loop",
        "scalar": "loop",
        "string": "string",
        "one-sided-truncated": "forward-ray",
        "two-sided-truncated": "two-sided-window",
    }.get(kind, "loop")
    orbit = OrbitSegment(np.array(doc["orbit"], dtype=float), orbit_kind)
    return Representation(kind, int(doc["dim"]), w, orbit, params, doc.get("beta"))
