"""The constraint curve p^-1(0) in the (r, s) plane for detA = 1.

p(r, s) = -4a(r+s) + (2-trA)(r+s)^2 + (2+trA)(r-s)^2 - 4*chat1

In the rotated coordinates u = r+s, w = r-s the polynomial is axis
aligned, so the conic type follows from the signs of Delta = 2-trA and
2+trA alone.  All eigenvalue pairs (d_i, dtilde_i) of a representation
with central value 4*chat1 must lie on this set, and the set is invariant
under Lhat.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .dynamics import AlgebraParams
from .errors import DomainError, EmptyCurve

CURVE_TOL = 1e-8


@dataclass(frozen=True)
class AxesCrossings:
    r_plus: float
    r_minus: float
    real_crossings: bool


@dataclass(frozen=True)
class CurveClass:
    shape: str      # ellipse | hyperbola | parabola | crossing-lines |
                    # parallel-lines | line | point | empty
    quadrant: str   # inside-positive | crosses-axes | outside | mixed


@dataclass(frozen=True)
class _Component:
    """One connected component with an exact parametrization t -> (r, s)."""

    param: callable
    t_lo: float
    t_hi: float


class ConstraintCurve:
    """Constraint curve of an algebra with detA = 1 and fixed chat1."""

    def __init__(self, params: AlgebraParams, chat1: Optional[float] = None):
        if abs(params.detA - 1.0) > 1e-12:
            raise DomainError("constraint curves are defined only for detA = 1")
        if chat1 is None:
            chat1 = params.chat1
        if chat1 is None:
            raise DomainError("chat1 is required (set it on the params or pass it)")
        self.params = params.with_chat1(float(chat1))
        self.chat1 = float(chat1)

    # -- evaluation ---------------------------------------------------------

    def evaluate_p(self, r, s):
        """p(r, s); accepts scalars or arrays."""
        t, a = self.params.trA, self.params.a
        u = np.asarray(r, dtype=float) + np.asarray(s, dtype=float)
        w = np.asarray(r, dtype=float) - np.asarray(s, dtype=float)
        out = -4.0 * a * u + (2.0 - t) * u ** 2 + (2.0 + t) * w ** 2 - 4.0 * self.chat1
        return float(out) if np.isscalar(r) and np.isscalar(s) else out

    def evaluate_p_centered(self, r, s):
        """The centered rewrite Delta[(r+s-2mu)^2 + ((2+trA)/Delta)(r-s)^2 - 4chat];
        identical to evaluate_p whenever trA != 2."""
        p = self.params
        if p.trA == 2.0:
            raise DomainError("centered form requires trA != 2")
        u = np.asarray(r, dtype=float) + np.asarray(s, dtype=float)
        w = np.asarray(r, dtype=float) - np.asarray(s, dtype=float)
        out = p.delta * (
            (u - 2.0 * p.mu) ** 2 + ((2.0 + p.trA) / p.delta) * w ** 2 - 4.0 * self.chat
        )
        return float(out) if np.isscalar(r) and np.isscalar(s) else out

    @property
    def chat(self) -> float:
        return self.params.chat

    # -- axis crossings -----------------------------------------------------

    def axes_crossings(self) -> AxesCrossings:
        """Crossings of the r-axis, r_pm = (a +- sqrt(a^2 + 4 chat1)) / 2.

        By the r <-> s symmetry of p the same values cross the s-axis.
        """
        a = self.params.a
        disc = a * a + 4.0 * self.chat1
        if disc < 0.0:
            return AxesCrossings(math.nan, math.nan, False)
        root = math.sqrt(disc)
        return AxesCrossings((a + root) / 2.0, (a - root) / 2.0, True)

    # -- classification -----------------------------------------------------

    def _shape(self) -> str:
        p = self.params
        delta = p.delta            # coefficient of (r+s)^2
        kw = 2.0 + p.trA           # coefficient of (r-s)^2
        if delta != 0.0 and kw != 0.0:
            chat = self.chat
            if delta * kw > 0.0:
                if delta * chat > 0.0:
                    return "ellipse"
                if chat == 0.0:
                    return "point"
                return "empty"
            if chat != 0.0:
                return "hyperbola"
            return "crossing-lines"
        if delta == 0.0:
            # trA = 2: linear in r+s
            if p.a != 0.0:
                return "parabola"
            if self.chat1 > 0.0:
                return "parallel-lines"
            if self.chat1 == 0.0:
                return "line"
            return "empty"
        # kw == 0: trA = -2, quadratic in r+s only
        disc = p.a * p.a + 4.0 * self.chat1
        if disc > 0.0:
            return "parallel-lines"
        if disc == 0.0:
            return "line"
        return "empty"

    def _has_positive_component(self, shape: str) -> bool:
        """Whether some whole component lies in the open positive quadrant."""
        p = self.params
        if shape == "point":
            return p.mu > 0.0
        if shape == "ellipse":
            chat = self.chat
            if p.trA > -2.0:
                theta = p.theta_elliptic
                return p.mu - math.sqrt(chat) / math.cos(theta) > 0.0
            return False
        if shape == "hyperbola" and p.trA > 2.0:
            chat = self.chat
            if chat > 0.0:
                theta = p.theta_hyperbolic
                # the branch opening towards +infinity misses the axes iff
                # its minimal coordinate is positive
                return p.mu + math.sqrt(chat) / math.cosh(theta) > 0.0
            return False
        if shape == "parabola":
            # opens towards +diagonal iff a > 0; then inside iff no axis contact
            return p.a > 0.0 and p.a * p.a + 4.0 * self.chat1 < 0.0
        return False

    def _positive_axis_contact(self, shape: str) -> bool:
        cross = self.axes_crossings()
        if shape == "hyperbola" and self.params.trA > 2.0 and self.chat > 0.0:
            # when the lower branch touches the quadrant only at its tip
            # (tip exactly on an axis: mu = sqrt(chat)), count it as crossing
            if self.params.mu - math.sqrt(self.chat) == 0.0:
                return True
        return cross.real_crossings and cross.r_plus >= 0.0

    def classify(self) -> CurveClass:
        """Conic type plus the relation of the curve to the positive quadrant."""
        shape = self._shape()
        if shape == "empty":
            return CurveClass(shape, "outside")
        inside = self._has_positive_component(shape)
        crossing = self._positive_axis_contact(shape)
        if shape == "point":
            if inside:
                return CurveClass(shape, "inside-positive")
            if self.params.mu == 0.0:
                return CurveClass(shape, "crosses-axes")
            return CurveClass(shape, "outside")
        if inside and crossing:
            return CurveClass(shape, "mixed")
        if inside:
            return CurveClass(shape, "inside-positive")
        if crossing:
            return CurveClass(shape, "crosses-axes")
        return CurveClass(shape, "outside")

    # -- parametrization and sampling ----------------------------------------

    def _span(self) -> float:
        """A parameter range large enough for plot-sized coordinate windows."""
        p = self.params
        size = abs(p.a) + abs(self.chat1) + 1.0
        try:
            size = max(size, abs(p.mu) + math.sqrt(abs(self.chat)))
        except DomainError:
            pass
        return 6.0 * size

    def components(self) -> List[_Component]:
        """Exact, ordered parametrizations of every component."""
        p = self.params
        shape = self._shape()
        mu2 = 2.0 * p.a / p.delta if p.trA != 2.0 else 0.0  # center of u

        def from_uw(u, w):
            return np.array([(u + w) / 2.0, (u - w) / 2.0])

        if shape == "empty":
            return []
        if shape == "point":
            pt = np.array([p.mu, p.mu])
            return [_Component(lambda t, pt=pt: pt.copy(), 0.0, 1.0)]
        if shape == "ellipse":
            theta = p.theta_elliptic
            root = math.sqrt(self.chat)

            def f(beta):
                return np.array(
                    [p.mu + root * math.cos(beta) / math.cos(theta),
                     p.mu + root * math.cos(beta - 2.0 * theta) / math.cos(theta)]
                )

            return [_Component(f, 0.0, 2.0 * math.pi)]
        if shape == "hyperbola":
            # normalized form (u - 2mu)^2 + (kw/delta) w^2 = 4 chat, kw/delta < 0
            chat = self.chat
            ratio = math.sqrt(-(2.0 + p.trA) / p.delta)  # |w| scale per u scale
            span = self._span()
            if chat > 0.0:
                # branches open along the diagonal u direction
                au = 2.0 * math.sqrt(chat)
                aw = au / ratio
                tmax = math.asinh(span / min(au, aw)) + 1.0

                def f1(t):
                    return from_uw(mu2 + au * math.cosh(t), aw * math.sinh(t))

                def f2(t):
                    return from_uw(mu2 - au * math.cosh(t), aw * math.sinh(t))

                return [_Component(f1, -tmax, tmax), _Component(f2, -tmax, tmax)]
            # chat < 0: branches open transverse to the diagonal
            au = 2.0 * math.sqrt(-chat)
            aw = au / ratio
            tmax = math.asinh(span / min(au, aw)) + 1.0

            def g1(t):
                return from_uw(mu2 + au * math.sinh(t), aw * math.cosh(t))

            def g2(t):
                return from_uw(mu2 + au * math.sinh(t), -aw * math.cosh(t))

            return [_Component(g1, -tmax, tmax), _Component(g2, -tmax, tmax)]
        if shape == "crossing-lines":
            # degenerate hyperbola: two lines through (mu, mu) along the
            # eigendirections (lambda, 1) of the linear part
            theta = p.theta_hyperbolic if p.trA > 2.0 else None
            if theta is not None:
                dirs = [np.array([math.exp(2.0 * theta), 1.0]),
                        np.array([math.exp(-2.0 * theta), 1.0])]
            else:  # trA < -2; eigenvalues are negative reals
                lam = (p.trA + math.sqrt(p.trA ** 2 - 4.0)) / 2.0
                dirs = [np.array([lam, 1.0]), np.array([1.0 / lam, 1.0])]
            center = np.array([p.mu, p.mu])
            span = self._span()
            comps = []
            for d in dirs:
                d = d / np.hypot(*d)
                comps.append(
                    _Component(lambda t, d=d, c=center: c + t * d, -span, span)
                )
            return comps
        if shape == "parabola":
            # u = (w^2 - chat1)/a, parametrized by w
            a = p.a
            span = self._span()

            def h(w):
                return from_uw((w * w - self.chat1) / a, w)

            wmax = math.sqrt(max(span * abs(a) + abs(self.chat1), 1.0))
            return [_Component(h, -wmax, wmax)]
        if shape in ("parallel-lines", "line"):
            span = self._span()
            comps = []
            if p.trA == 2.0:
                # lines of constant w = r - s
                vals = [0.0] if shape == "line" else [
                    math.sqrt(self.chat1), -math.sqrt(self.chat1)
                ]
                for w in vals:
                    comps.append(
                        _Component(lambda u, w=w: from_uw(u, w), -span, span)
                    )
            else:
                # trA = -2: lines of constant u = r + s
                disc = p.a * p.a + 4.0 * self.chat1
                root = math.sqrt(max(disc, 0.0))
                vals = sorted({(p.a + root) / 2.0, (p.a - root) / 2.0}, reverse=True)
                for u in vals:
                    comps.append(
                        _Component(lambda w, u=u: from_uw(u, w), -span, span)
                    )
            return comps
        raise AssertionError(f"unhandled shape {shape}")

    def sample(self, count: int) -> List[np.ndarray]:
        """count points per component, ordered along each component.

        Raises EmptyCurve when the curve is the empty set.
        """
        if count < 2:
            raise DomainError("count must be >= 2")
        comps = self.components()
        if not comps:
            raise EmptyCurve("the constraint curve is empty")
        out = []
        for comp in comps:
            ts = np.linspace(comp.t_lo, comp.t_hi, count)
            out.append(np.array([comp.param(t) for t in ts]))
        return out

    def nearest_point(self, target, grid: int = 4096) -> np.ndarray:
        """The curve point closest to target, by dense sampling plus a local
        golden-section refinement."""
        target = np.asarray(target, dtype=float)
        comps = self.components()
        if not comps:
            raise EmptyCurve("the constraint curve is empty")
        best = None
        for comp in comps:
            ts = np.linspace(comp.t_lo, comp.t_hi, grid)
            pts = np.array([comp.param(t) for t in ts])
            d2 = np.sum((pts - target) ** 2, axis=1)
            i = int(np.argmin(d2))
            lo = ts[max(i - 1, 0)]
            hi = ts[min(i + 1, grid - 1)]
            t = _golden_min(
                lambda t: float(np.sum((comp.param(t) - target) ** 2)), lo, hi
            )
            cand = comp.param(t)
            dist = float(np.sum((cand - target) ** 2))
            if best is None or dist < best[0]:
                best = (dist, cand)
        return best[1]

    # -- export ---------------------------------------------------------------

    def sample_csv(self, count: int) -> str:
        """Curve samples as CSV with header component,r,s."""
        buf = io.StringIO()
        buf.write("component,r,s\n")
        for cid, pts in enumerate(self.sample(count)):
            for r, s in pts:
                buf.write(f"{cid},{r:.12g},{s:.12g}\n")
        return buf.getvalue()


def _golden_min(f, lo: float, hi: float, iters: int = 80) -> float:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2.0
