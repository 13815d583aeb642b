"""Dressed-state paths on the Bloch sphere and their phase functionals.

A path point ``(alpha, beta, f)`` stands for the state

    exp(-i f) [cos(alpha/2)|0> + sin(alpha/2) exp(i beta)|1>].

The azimuth is undefined at the poles. A pole sample may therefore carry a
jump in ``beta``: finite differences skip over it, and the phase integrals
add the jump as an instantaneous azimuthal move at the pole latitude. The
dynamical integrand ``sin a tan a`` vanishes at both poles, so the jump only
feeds the geometric phase, with weight ``(1 - cos a)/2`` (0 north, 1 south).

Over a cyclic evolution ``|psi(tau)> = exp(-i f) |psi(0)>`` with zero
dynamical phase, :func:`geometric_phase` returns ``f`` modulo ``2 pi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

# sin(alpha) below this counts as a pole sample
POLE_TOL = 1e-6
# smallest |cos alpha| accepted while the azimuth is moving
TAN_LIMIT = 1e-9


@dataclass(frozen=True)
class PathPoint:
    alpha: float
    beta: float
    f: float = 0.0


@dataclass(frozen=True)
class PathTrajectory:
    """Sampled path; ``times`` start at 0 and increase strictly."""

    times: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    f: np.ndarray

    def __post_init__(self):
        n = len(self.times)
        if not (len(self.alpha) == len(self.beta) == len(self.f) == n):
            raise ValueError("trajectory arrays must have equal length")
        if n == 0:
            raise ValueError("trajectory needs at least one sample")
        if self.times[0] != 0:
            raise ValueError("trajectory must start at t = 0")
        if n > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        object.__setattr__(self, "alpha", np.clip(np.asarray(self.alpha, dtype=float), 0.0, math.pi))

    @classmethod
    def from_points(cls, samples: Sequence[tuple[float, PathPoint]]) -> "PathTrajectory":
        t = np.array([s[0] for s in samples], dtype=float)
        return cls(
            t,
            np.array([p.alpha for _, p in samples]),
            np.array([p.beta for _, p in samples]),
            np.array([p.f for _, p in samples]),
        )

    def __len__(self) -> int:
        return len(self.times)

    def point(self, i: int) -> PathPoint:
        return PathPoint(float(self.alpha[i]), float(self.beta[i]), float(self.f[i]))

    @property
    def at_pole(self) -> np.ndarray:
        return np.sin(self.alpha) < POLE_TOL


def wrap(angle):
    """Reduce to ``(-pi, pi]``."""
    return math.pi - np.mod(math.pi - np.asarray(angle, dtype=float), 2 * math.pi)


def _azimuth_steps(traj: PathTrajectory) -> np.ndarray:
    """Wrapped increments of ``beta`` between consecutive samples."""
    return wrap(np.diff(traj.beta))


def _split_moves(traj: PathTrajectory):
    """Separate smooth azimuthal motion from jumps that happen at a pole.

    Returns the per-interval smooth increments and, for each jump, the
    increment and the polar angle where it happened.
    """
    db = _azimuth_steps(traj)
    pole = traj.at_pole
    touches = pole[:-1] | pole[1:]
    smooth = np.where(touches, 0.0, db)
    jump_db = db[touches]
    jump_alpha = np.where(pole[1:], traj.alpha[1:], traj.alpha[:-1])[touches]
    return smooth, jump_db, jump_alpha


def drive_from_path(traj: PathTrajectory, atol: float = 1e-12) -> list[tuple[float, float, float]]:
    """Invert ``a' = W sin(phi - b)``, ``b' = -W cot(a) cos(phi - b)``.

    Rates come from forward differences, reported at interval midpoints.
    Increasing ``alpha`` along a meridian gives ``phi = beta + pi/2``.
    Raises ``ValueError`` when the azimuth moves at a pole, where ``cot``
    diverges.
    """
    if len(traj) < 2:
        return []
    dt = np.diff(traj.times)
    da = np.diff(traj.alpha) / dt
    db = _azimuth_steps(traj) / dt
    pole = traj.at_pole
    out = []
    for i in range(len(dt)):
        tm = 0.5 * (traj.times[i] + traj.times[i + 1])
        if pole[i] or pole[i + 1]:
            # beta is undefined at the pole sample; only the polar motion counts
            bdot = 0.0
        else:
            bdot = db[i] if abs(db[i]) > atol else 0.0
        a = 0.5 * (traj.alpha[i] + traj.alpha[i + 1])
        b = traj.beta[i] if not pole[i] else traj.beta[i + 1]
        if bdot != 0.0 and math.sin(a) < POLE_TOL:
            raise ValueError(f"azimuthal motion at a pole near t={tm:g}")
        if bdot != 0.0 and abs(math.cos(a)) < TAN_LIMIT:
            # cot(alpha) = 0: no finite drive moves the azimuth on the equator
            raise ValueError(f"azimuthal motion on the equator near t={tm:g}")
        # W sin(phi-b) = a', W cos(phi-b) = -b' tan(a)
        y, x = da[i], -bdot * math.tan(a)
        rabi = math.hypot(y, x)
        phase = b + math.atan2(y, x) if rabi > 0 else b
        out.append((tm, rabi, phase))
    return out


def dynamical_phase(traj: PathTrajectory, atol: float = 1e-12) -> float:
    """``(1/2) int b' sin(a) tan(a) dt`` by the trapezoid rule.

    Azimuth increments below ``atol`` count as zero. Raises
    ``ValueError`` if the azimuth moves where ``tan(alpha)`` overflows.
    """
    if len(traj) < 2:
        return 0.0
    smooth, _, _ = _split_moves(traj)
    smooth = np.where(np.abs(smooth) > atol, smooth, 0.0)
    moving = smooth != 0
    cos_a = np.cos(traj.alpha)
    near_equator = np.abs(cos_a) < TAN_LIMIT
    if np.any(moving & (near_equator[:-1] | near_equator[1:])):
        raise ValueError("tan(alpha) overflows while the azimuth moves")
    g = np.where(near_equator, 0.0, np.sin(traj.alpha) * np.tan(traj.alpha))
    return float(0.5 * np.sum(smooth * 0.5 * (g[:-1] + g[1:])))


def geometric_phase(traj: PathTrajectory) -> float:
    """Geometric phase ``(1/2) int b' (1 - cos a) dt``, pole jumps included.

    The orientation is the one of ``f`` in ``U = exp(-i f n.sigma)``: a
    cyclic meridian loop returns the rotation phase of the gate it builds,
    and a closed loop gives half its solid angle. Trapezoid rule.
    """
    if len(traj) < 2:
        return 0.0
    smooth, jump_db, jump_alpha = _split_moves(traj)
    w = 1.0 - np.cos(traj.alpha)
    total = np.sum(smooth * 0.5 * (w[:-1] + w[1:]))
    total += np.sum(jump_db * (1.0 - np.cos(jump_alpha)))
    return float(0.5 * total)


def trajectory_from_states(times: np.ndarray, states: np.ndarray) -> PathTrajectory:
    """Read ``(alpha, beta, f)`` off two-level state vectors.

    At a pole the azimuth is carried over from the previous sample, so a pole
    transit shows up as a single jump on the next off-pole sample.
    """
    states = np.asarray(states, dtype=complex)
    c0, c1 = states[:, 0], states[:, 1]
    alpha = 2.0 * np.arctan2(np.abs(c1), np.abs(c0))
    beta = np.angle(c1) - np.angle(c0)
    f = -np.angle(c0)
    pole = np.sin(alpha) < POLE_TOL
    for i in range(len(beta)):
        if pole[i]:
            beta[i] = beta[i - 1] if i > 0 else 0.0
        if pole[i] and alpha[i] > 1.0:
            # f is read from the |1> amplitude at the south pole
            f[i] = -(np.angle(c1[i]) - beta[i])
    return PathTrajectory(np.asarray(times, dtype=float), alpha, beta, f)


def meridian_speed(traj: PathTrajectory) -> float:
    """Largest ``|b' sin a|`` off the poles; zero for a meridian-only path."""
    if len(traj) < 2:
        return 0.0
    smooth, _, _ = _split_moves(traj)
    s = 0.5 * (np.sin(traj.alpha[:-1]) + np.sin(traj.alpha[1:]))
    return float(np.max(np.abs(smooth * s / np.diff(traj.times))))
