"""One-dimensional shear backgrounds V(x) with flat strips.

V'' is a sum of smooth bumps, one per gap between consecutive strips
(cyclically), so V'' vanishes identically on every strip and V' takes a
single constant value v_k on strip k.  V' and V are the exact
antiderivatives of V'' (composite Gauss-Legendre quadrature of the bumps),
shifted to zero mean.
"""
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ValidationError

TWO_PI = 2.0 * np.pi

_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


@dataclass(frozen=True)
class StripSpec:
    """Closed interval [a, b] of x on which the background is flat."""

    a: float
    b: float

    def __post_init__(self):
        if not (0.0 <= self.a < self.b <= TWO_PI):
            raise ValidationError(f"strip needs 0 <= a < b <= 2pi, got a={self.a!r}, b={self.b!r}")

    @property
    def width(self):
        return self.b - self.a

    @property
    def midpoint(self):
        return 0.5 * (self.a + self.b)

    def contains(self, x):
        return self.a <= x <= self.b


class GapBump:
    """Normalized C-infinity bump on the open interval (left, right).

    B(s) = exp(steepness * (4/w - w / ((s - left)(right - s)))), w = right - left.
    B peaks at 1 in the middle of the gap and behaves like
    exp(-steepness / distance) at either edge.
    """

    def __init__(self, left, right, steepness, panels=64):
        if right <= left:
            raise ValidationError(f"empty gap ({left}, {right})")
        if steepness <= 0:
            raise ValidationError(f"bump steepness must be positive, got {steepness}")
        self.left = float(left)
        self.right = float(right)
        self.width = self.right - self.left
        self.steepness = float(steepness)
        self._edges = np.linspace(self.left, self.right, panels + 1)
        # cumulative integral of B and of (u - left) B at panel edges
        lo, hi = self._edges[:-1], self._edges[1:]
        u, wts = self._nodes(lo, hi)
        b = self.value(u)
        self._cum0 = np.concatenate([[0.0], np.cumsum((b * wts).sum(axis=1))])
        self._cum1 = np.concatenate([[0.0], np.cumsum((b * (u - self.left) * wts).sum(axis=1))])
        self.mass = self._cum0[-1]
        # moments in absolute coordinate: int u B du, int (2pi - u)^2 / 2 B du
        self.first_moment = self._cum1[-1] + self.left * self.mass
        self.tail_moment = float((b * 0.5 * (TWO_PI - u) ** 2 * wts).sum())

    @staticmethod
    def _nodes(lo, hi):
        lo = np.asarray(lo, dtype=np.float64)[..., None]
        hi = np.asarray(hi, dtype=np.float64)[..., None]
        half = 0.5 * (hi - lo)
        return lo + half * (_GL_X + 1.0), half * _GL_W

    def value(self, s):
        s = np.asarray(s, dtype=np.float64)
        out = np.zeros_like(s)
        inside = (s > self.left) & (s < self.right)
        si = s[inside]
        w = self.width
        out[inside] = np.exp(self.steepness * (4.0 / w - w / ((si - self.left) * (self.right - si))))
        return out

    def _partial(self, s):
        """(int_left^s B, int_left^s (u - left) B) for s inside the gap."""
        j = np.clip(np.searchsorted(self._edges, s, side="right") - 1, 0, len(self._edges) - 2)
        u, wts = self._nodes(self._edges[j], s)
        b = self.value(u) * wts
        i0 = self._cum0[j] + b.sum(axis=-1)
        i1 = self._cum1[j] + (b * (u - self.left)).sum(axis=-1)
        return i0, i1

    def integral(self, s):
        """I(s) = int_left^min(s, right) B."""
        s = np.asarray(s, dtype=np.float64)
        out = np.where(s >= self.right, self.mass, 0.0)
        inside = (s > self.left) & (s < self.right)
        if inside.any():
            out[inside] = self._partial(s[inside])[0]
        return out

    def double_integral(self, s):
        """J(s) = int_left^min(s, right) (s - u) B(u) du."""
        s = np.asarray(s, dtype=np.float64)
        out = np.where(s >= self.right, s * self.mass - self.first_moment, 0.0)
        inside = (s > self.left) & (s < self.right)
        if inside.any():
            i0, i1 = self._partial(s[inside])
            out[inside] = (s[inside] - self.left) * i0 - i1
        return out


@dataclass(frozen=True)
class ShearFlow:
    """Periodic zero-mean background V with V'' = 0 on each strip.

    Use :func:`build_shear_flow` to construct.  Internally x is measured from
    the left end of the first strip, so every gap is an ordinary interval in
    [0, 2pi] and the last gap ends at 2pi.
    """

    strips: tuple
    gap_amplitudes: tuple       # as supplied
    amplitudes: tuple           # after the zero-integral correction
    steepness: float
    bumps: tuple = field(repr=False)
    slope_const: float = field(repr=False)
    value_const: float = field(repr=False)
    velocities: tuple = ()

    @property
    def K(self):
        return len(self.strips)

    def _local(self, x):
        return np.mod(np.asarray(x, dtype=np.float64) - self.strips[0].a, TWO_PI)

    def eval(self, x, order=0):
        """V (order 0), V' (order 1) or V'' (order 2) at x; vectorized."""
        s = self._local(x)
        if order == 2:
            out = np.zeros_like(s)
            for amp, bump in zip(self.amplitudes, self.bumps):
                if amp != 0.0:
                    out = out + amp * bump.value(s)
            return out
        if order == 1:
            out = np.full_like(s, self.slope_const)
            for amp, bump in zip(self.amplitudes, self.bumps):
                if amp != 0.0:
                    out = out + amp * bump.integral(s)
            return out
        if order == 0:
            out = self.value_const + self.slope_const * s
            for amp, bump in zip(self.amplitudes, self.bumps):
                if amp != 0.0:
                    out = out + amp * bump.double_integral(s)
            return out
        raise ValueError(f"order must be 0, 1 or 2, got {order!r}")

    def strip_velocity(self, k):
        if not 0 <= k < self.K:
            raise IndexError(f"strip index {k} out of range for K={self.K}")
        return self.velocities[k]

    def commensurate_pairs(self, max_denominator=64, rtol=1e-9):
        return commensurate_pairs(self.velocities, max_denominator, rtol)


def commensurate_pairs(velocities, max_denominator=64, rtol=1e-9):
    """Index pairs (j, k) whose velocity ratio is a small rational (or both zero)."""
    v = velocities
    pairs = []
    for j in range(len(v)):
        for k in range(j + 1, len(v)):
            if v[k] == 0.0 or v[j] == 0.0:
                if v[k] == v[j]:
                    pairs.append((j, k))
                continue
            ratio = v[j] / v[k]
            frac = Fraction(ratio).limit_denominator(max_denominator)
            if abs(float(frac) - ratio) <= rtol * abs(ratio):
                pairs.append((j, k))
    return pairs


def validate_strips(strips):
    strips = [s if isinstance(s, StripSpec) else StripSpec(*s) for s in strips]
    if len(strips) < 1:
        raise ValidationError("at least one strip is required", key="strips")
    for k in range(1, len(strips)):
        prev, cur = strips[k - 1], strips[k]
        if cur.a <= prev.a:
            raise ValidationError(f"strips must be sorted by a: strip {k - 1} {prev} precedes strip {k} {cur}", key="strips")
        if cur.a <= prev.b:
            raise ValidationError(f"strips {k - 1} {prev} and {k} {cur} overlap", key="strips")
    if strips[-1].b >= strips[0].a + TWO_PI:
        raise ValidationError(f"first and last strips overlap across the periodic boundary", key="strips")
    return strips


def build_shear_flow(strips, gap_amplitudes, steepness=5.0, panels=64):
    """Build a ShearFlow that is flat on every strip.

    ``gap_amplitudes[k]`` scales the bump in the gap that follows strip k
    (the last gap wraps to the first strip).  The amplitudes are shifted by a
    common constant so that the integral of V'' vanishes; with equal-width
    gaps and amplitudes summing to zero the shift is zero.
    """
    strips = validate_strips(strips)
    K = len(strips)
    amps = [float(a) for a in gap_amplitudes]
    if len(amps) != K:
        raise ValidationError(f"need one amplitude per gap ({K}), got {len(amps)}", key="gap_amplitudes")
    if not all(np.isfinite(amps)):
        raise ValidationError("amplitudes must be finite", key="gap_amplitudes")
    origin = strips[0].a
    bumps = []
    for k in range(K):
        left = strips[k].b - origin
        right = (strips[k + 1].a - origin) if k + 1 < K else TWO_PI
        bumps.append(GapBump(left, right, steepness, panels=panels))
    masses = np.array([b.mass for b in bumps])
    shift = float(np.dot(amps, masses) / masses.sum())
    eff = [a - shift for a in amps]
    if K >= 2 and all(a == 0.0 for a in eff):
        warnings.warn("all gap amplitudes vanish: every strip velocity is equal", RuntimeWarning, stacklevel=2)
    # V' = C + sum amp I_g ; zero mean of V' fixes C and makes V periodic
    slope_const = -sum(a * (TWO_PI * b.mass - b.first_moment) for a, b in zip(eff, bumps)) / TWO_PI
    value_const = -slope_const * np.pi - sum(a * b.tail_moment for a, b in zip(eff, bumps)) / TWO_PI
    flow = ShearFlow(
        strips=tuple(strips),
        gap_amplitudes=tuple(amps),
        amplitudes=tuple(eff),
        steepness=float(steepness),
        bumps=tuple(bumps),
        slope_const=float(slope_const),
        value_const=float(value_const),
    )
    vel = tuple(float(flow.eval(np.array([s.midpoint]), order=1)[0]) for s in strips)
    object.__setattr__(flow, "velocities", vel)
    vmax = max(abs(v) for v in vel)
    if K >= 2 and any(abs(vel[j] - vel[k]) <= 1e-12 * vmax for j in range(K) for k in range(j + 1, K)) and vmax > 0:
        warnings.warn(f"equal strip velocities {vel}: solution is not K-frequency quasi-periodic", RuntimeWarning, stacklevel=2)
    return flow


def eval_background(flow, x, order):
    return flow.eval(x, order)


def strip_velocity(flow, k):
    return flow.strip_velocity(k)
