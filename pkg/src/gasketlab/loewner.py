"""Discretized chordal Loewner evolution and trace computation.

The driver is sampled by Euler-Maruyama; with extra marked (force)
points, their flows follow the same first-order scheme with a guarded
denominator, and the evolution stops at the continuation threshold (the
first time the weights of the currently collided force points sum to -2
or below).  A force point is treated as collided while it sits within
10*dt of the driving value.

The trace tip at each step comes from composing inverse vertical-slit
maps from the last step back to the first: one constant-driver step of
length dt maps the upper half-plane onto itself minus a vertical slit via
z -> xi + sqrt((z - xi)^2 + 4 dt), whose inverse takes w in the closed
upper half-plane to xi + i sqrt(4 dt - (w - xi)^2) with the principal
square root, keeping imaginary parts nonnegative exactly.  For the zero
driver the composition telescopes to the closed form 2 i sqrt(t).
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field

import numpy as np

from .rng import normals

EPS0 = 1e-9  # signed-infinitesimal resolution for 0+ / 0- force points


class LoewnerNumericsError(RuntimeError):
    """Raised instead of silently emitting non-finite trace points."""


@dataclass
class LoewnerDriver:
    times: np.ndarray
    values: np.ndarray
    kind: str
    dt: float
    kappa: float | None = None
    seed: int | None = None
    force_points: tuple = ()
    force_paths: np.ndarray | None = field(default=None, repr=False)
    collided: np.ndarray | None = field(default=None, repr=False)
    stopped: bool = False

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.size < 1 or t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise ValueError("times must start at 0 and increase strictly")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("driver values must be finite")


def resolve_position(pos, dt: float) -> tuple:
    """(initial value, side) of a force-point position spec.

    Accepts a float or the signed-infinitesimal strings "0+" / "0-",
    resolved to +-dt*EPS0.
    """
    if isinstance(pos, str):
        s = pos.strip()
        if s in ("0+", "+0"):
            return dt * EPS0, 1.0
        if s in ("0-", "-0"):
            return -dt * EPS0, -1.0
        pos = float(s)
    pos = float(pos)
    if pos == 0.0:
        raise ValueError("use '0+' or '0-' to place a force point at the origin")
    return pos, math.copysign(1.0, pos)


def sample_driver(
    kind: str,
    horizon: float,
    dt: float,
    kappa: float | None = None,
    force_points=(),
    seed: int = 0,
) -> LoewnerDriver:
    """Driver path of the requested kind, deterministic per seed.

    kind: "zero" (deterministic zero driver), "sle", or "sle_rho" with
    force_points as (position, weight) pairs.
    """
    if dt <= 0 or horizon <= 0:
        raise ValueError("need dt > 0 and horizon > 0")
    n = int(round(horizon / dt))
    times = np.arange(n + 1) * dt
    if kind == "zero":
        return LoewnerDriver(times=times, values=np.zeros(n + 1), kind=kind, dt=dt)
    if kind not in ("sle", "sle_rho"):
        raise ValueError(f"unknown driver kind: {kind!r}")
    if kappa is None or kappa <= 0:
        raise ValueError("sle drivers need kappa > 0")
    db = normals(seed, n) * math.sqrt(kappa * dt)
    if kind == "sle":
        w = np.concatenate([[0.0], np.cumsum(db)])
        return LoewnerDriver(times=times, values=w, kind=kind, dt=dt, kappa=kappa, seed=seed)

    fp = [(resolve_position(p, dt), float(rho)) for p, rho in force_points]
    sides = np.array([s for (_, s), _ in fp])
    v = np.array([p for (p, _), _ in fp])
    rhos = np.array([rho for _, rho in fp])
    nf = v.size
    w = 0.0
    wpath = np.zeros(n + 1)
    vpath = np.zeros((n + 1, nf))
    vpath[0] = v
    coll = np.zeros((n + 1, nf), dtype=bool)
    floor = 10.0 * dt
    # dynamics regularized at the diffusive scale, so a freshly resolved
    # 0+ force point separates at the natural sqrt(dt) rate
    floor_dyn = 0.5 * math.sqrt(kappa * dt)
    stopped = False
    last = n
    for j in range(n):
        den = v - w
        hit = np.abs(den) < floor
        coll[j] = hit
        # j = 0 is the resolution step for infinitesimal placements; the
        # continuation threshold only applies once the flow has started
        if j > 0 and rhos[hit].sum() <= -2.0:
            stopped = True
            last = j
            break
        den = np.where(np.abs(den) < floor_dyn, sides * floor_dyn, den)
        drift = np.sum(rhos / den) if nf else 0.0
        w_new = w + db[j] - drift * dt
        v_new = v + 2.0 * dt / den
        # force points never cross the driving function
        crossed = sides * (v_new - w_new) < 0
        v_new = np.where(crossed, w_new + sides * dt * EPS0, v_new)
        w, v = w_new, v_new
        wpath[j + 1] = w
        vpath[j + 1] = v
    if not stopped:
        den = v - w
        coll[n] = np.abs(den) < floor
    k = last if stopped else n
    return LoewnerDriver(
        times=times[: k + 1],
        values=wpath[: k + 1],
        kind=kind,
        dt=dt,
        kappa=kappa,
        seed=seed,
        force_points=tuple(force_points),
        force_paths=vpath[: k + 1],
        collided=coll[: k + 1],
        stopped=stopped,
    )


@dataclass
class SleTrace:
    times: np.ndarray
    points: np.ndarray  # complex, closed upper half-plane
    dt: float
    kappa: float | None

    def __post_init__(self):
        if self.points[0] != 0:
            raise ValueError("trace must start at the origin")
        if np.any(self.points.imag < 0):
            raise ValueError("trace left the upper half-plane")


def slit_map_forward(z, xi: float, dt: float):
    """One forward step: H minus the slit above xi onto H.

    Branch chosen so the image stays in the closed upper half-plane and
    real points keep their side of the slit base.
    """
    u = np.asarray(z, dtype=complex) - xi
    s = np.sqrt(u * u + 4.0 * dt)
    flip = (s.imag < 0) | ((s.imag == 0) & (u.real < 0))
    return xi + np.where(flip, -s, s)


def _slit_map_inverse(w, xi: float, dt: float):
    # image in the closed upper half-plane; real arguments beyond the slit
    # base keep their side (the principal branch alone would fold them left)
    u = np.asarray(w, dtype=complex) - xi
    s = 1j * np.sqrt(4.0 * dt - u * u)
    fold = (u.imag == 0) & (u.real > 0) & (u.real * u.real >= 4.0 * dt)
    return xi + np.where(fold, -s, s)


def trace(driver: LoewnerDriver, stride: int = 1) -> SleTrace:
    """Tip positions gamma(t_k) for k = 0, stride, 2*stride, ..., n.

    Backward composition of the per-step inverse slit maps (last step
    innermost); cost is one map application per remaining step per
    retained tip.
    """
    if stride < 1:
        raise ValueError("stride must be >= 1")
    xi = driver.values[:-1]  # left-endpoint driver constant per step
    n = xi.size
    dt = driver.dt
    if n == 0:
        return SleTrace(
            times=driver.times[:1],
            points=np.zeros(1, dtype=complex),
            dt=dt,
            kappa=driver.kappa,
        )
    sel = list(range(stride, n + 1, stride))
    if sel[-1] != n:
        sel.append(n)
    # gamma(t_k) = lim g_{t_k}^{-1}(U_{t_k} + i0): innermost map evaluated
    # at the current driver value
    w = np.array([driver.values[k] for k in sel], dtype=complex)
    for j in range(n, 0, -1):
        i0 = bisect_left(sel, j)
        w[i0:] = _slit_map_inverse(w[i0:], float(xi[j - 1]), dt)
    if not np.all(np.isfinite(w)):
        raise LoewnerNumericsError("trace composition produced non-finite values")
    pts = np.concatenate([[0j], w])
    times = np.concatenate([[0.0], driver.times[sel]])
    return SleTrace(times=times, points=pts, dt=dt, kappa=driver.kappa)
