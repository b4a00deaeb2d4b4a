"""Ground-truth trajectory generation, sampling, and observation noise.

Systems are integrated with fixed-step classical RK4 on the companion form
(state = output derivatives of orders 0..m-1, top derivative given by the
parameter-linear flow).  Observation noise is driven by the counter-based
Philox generator, with Gaussian draws produced by the inverse normal CDF of
uniform variates, so every output is exactly reproducible from its seed.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import ndtri

from . import _kernels
from .estimator import FeatureMap, polynomial_feature_map

__all__ = [
    "IntegrationDivergedError",
    "NoiseModel",
    "SystemModel",
    "Trajectory",
    "integrate",
    "observe",
    "van_der_pol",
    "harmonic_oscillator",
    "write_trajectory_csv",
    "read_trajectory_csv",
]

PRNG_NAME = "philox4x64"


class IntegrationDivergedError(RuntimeError):
    """The state left the finite range; ``time`` holds the first bad sample instant."""

    def __init__(self, time: float):
        super().__init__(f"integration diverged at t = {time:g}")
        self.time = time


@dataclass(frozen=True)
class NoiseModel:
    """Observation noise: none, gaussian(sigma2), or sign_flip(e).

    The sign-flip law adds w = +(e + y) or -(e + y) with probability 1/2
    each, so the observation is 2y + e or -e.
    """

    kind: str
    sigma2: float = 0.0
    e: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "gaussian", "sign_flip"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.sigma2 < 0.0:
            raise ValueError(f"noise variance must be >= 0, got {self.sigma2}")

    @classmethod
    def none(cls) -> "NoiseModel":
        return cls(kind="none")

    @classmethod
    def gaussian(cls, sigma2: float) -> "NoiseModel":
        return cls(kind="gaussian", sigma2=sigma2)

    @classmethod
    def sign_flip(cls, e: float) -> "NoiseModel":
        return cls(kind="sign_flip", e=e)

    @classmethod
    def parse(cls, text: str) -> "NoiseModel":
        """Parse 'none', 'gaussian:<sigma2>', or 'sign_flip:<e>'."""
        name, _, arg = text.partition(":")
        name = name.strip()
        if name == "none":
            return cls.none()
        if name == "gaussian":
            return cls.gaussian(float(arg))
        if name == "sign_flip":
            return cls.sign_flip(float(arg))
        raise ValueError(f"cannot parse noise spec {text!r}")

    def describe(self) -> str:
        if self.kind == "gaussian":
            return f"gaussian:{self.sigma2!r}"
        if self.kind == "sign_flip":
            return f"sign_flip:{self.e!r}"
        return "none"


@dataclass(frozen=True)
class SystemModel:
    """Parameter-linear system: the m-th output derivative equals theta . phi(state)."""

    m: int
    p: int
    phi: FeatureMap
    theta: np.ndarray
    xi0: np.ndarray
    T: float

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        xi0 = np.asarray(self.xi0, dtype=float)
        if self.m != self.phi.m or self.p != self.phi.p:
            raise ValueError("model dimensions disagree with the feature map")
        if theta.shape != (self.p,) or xi0.shape != (self.m,):
            raise ValueError(
                f"need theta of shape ({self.p},) and xi0 of shape ({self.m},), "
                f"got {theta.shape} and {xi0.shape}"
            )
        if self.T <= 0.0:
            raise ValueError(f"horizon must be positive, got {self.T}")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "xi0", xi0)

    def with_theta(self, theta) -> "SystemModel":
        return replace(self, theta=np.asarray(theta, dtype=float))


@dataclass(frozen=True)
class Trajectory:
    """Exact sampled output and derivatives, plus the augmented state at t = 0.

    ``states[i, d]`` is the d-th output derivative at time (i+1) T / n for
    d = 0..m; ``initial_state`` holds the same quantities at t = 0.
    """

    times: np.ndarray
    states: np.ndarray
    initial_state: np.ndarray

    @property
    def y(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def n(self) -> int:
        return self.states.shape[0]

    @property
    def m(self) -> int:
        return self.states.shape[1] - 1


def _flow_callable(model: SystemModel):
    phi, theta = model.phi, model.theta

    def flow(state: np.ndarray) -> float:
        return float(theta @ np.asarray(phi.eval(state), dtype=float))

    return flow


def _integrate_generic(model: SystemModel, n: int, substeps: int):
    """Fallback RK4 for feature maps without a monomial description."""
    m = model.m
    flow = _flow_callable(model)

    def deriv(state):
        ds = np.empty(m)
        ds[:-1] = state[1:]
        ds[-1] = flow(state)
        return ds

    h = model.T / n / substeps
    s = model.xi0.astype(float).copy()
    out = np.empty((n + 1, m + 1))
    out[0, :m] = s
    out[0, m] = flow(s)
    for i in range(1, n + 1):
        for _ in range(substeps):
            k1 = deriv(s)
            k2 = deriv(s + 0.5 * h * k1)
            k3 = deriv(s + 0.5 * h * k2)
            k4 = deriv(s + h * k3)
            s = s + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i, :m] = s
        out[i, m] = flow(s)
        if not np.all(np.isfinite(out[i])):
            return out, i
    return out, -1


def integrate(model: SystemModel, n: int, substeps: int = 10) -> Trajectory:
    """Sample the exact solution at times i T / n, i = 1..n.

    Classical fixed-step RK4 with step (T/n)/substeps.  Polynomial feature
    maps run through the kernel backend selected at import; other maps use a
    generic Python loop.
    """
    if n < 2:
        raise ValueError(f"need at least 2 samples, got n={n}")
    if substeps < 1:
        raise ValueError(f"substeps must be >= 1, got {substeps}")
    if model.phi.monomials is not None:
        coef = []
        expo = []
        for k, feat in enumerate(model.phi.monomials):
            for c, ex in feat:
                coef.append(model.theta[k] * c)
                expo.append(ex)
        out, fail = _kernels.rk4_polyflow(
            np.asarray(model.xi0, dtype=float),
            np.asarray(coef, dtype=float),
            np.asarray(expo, dtype=np.int32).reshape(len(expo), model.m),
            n,
            substeps,
            model.T,
        )
    else:
        out, fail = _integrate_generic(model, n, substeps)
    if fail >= 0:
        raise IntegrationDivergedError(time=fail * model.T / n)
    times = np.arange(1, n + 1) * (model.T / n)
    return Trajectory(times=times, states=np.asarray(out[1:]), initial_state=np.asarray(out[0]))


def _uniform_open(gen: np.random.Generator, size: int) -> np.ndarray:
    # 53-bit uniforms strictly inside (0, 1); keeps ndtri finite.
    return gen.integers(1, 2**53, size=size, dtype=np.uint64).astype(np.float64) / 2**53


def observe(traj: Trajectory, noise: NoiseModel, seed: int) -> np.ndarray:
    """Corrupt the sampled output with the given noise model, reproducibly."""
    y = traj.y
    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    if noise.kind == "none":
        return y.copy()
    if noise.kind == "gaussian":
        w = math.sqrt(noise.sigma2) * ndtri(_uniform_open(gen, y.size))
        return y + w
    # sign_flip: w = +-(e + y) with equal probability
    plus = gen.random(y.size) < 0.5
    return y + np.where(plus, noise.e + y, -(noise.e + y))


def van_der_pol(
    theta1: float = 40.0,
    theta2: float = -400.0,
    x0: float = 1.0,
    xdot0: float = 20.0,
    T: float = 1.0,
) -> SystemModel:
    """Van der Pol oscillator x'' = theta1 (1 - x^2) x' + theta2 x.

    Feature map ((1 - x^2) x', x); the Holder pair is declared as alpha = 1
    with a unit coefficient, to be tightened by callers that know the state
    box actually visited.
    """
    phi = polynomial_feature_map(
        features=[
            (((1.0), (0, 1)), ((-1.0), (2, 1))),
            (((1.0), (1, 0)),),
        ],
        m=2,
    )
    return SystemModel(
        m=2, p=2, phi=phi, theta=np.array([theta1, theta2]), xi0=np.array([x0, xdot0]), T=T
    )


def harmonic_oscillator(
    omega: float = 2.0 * math.pi, x0: float = 1.0, xdot0: float = 0.0, T: float = 10.0
) -> SystemModel:
    """Zero-damping special case of the Van der Pol model: x'' = -omega^2 x."""
    return van_der_pol(theta1=0.0, theta2=-(omega**2), x0=x0, xdot0=xdot0, T=T)


def atomic_write_text(path: str, text: str) -> None:
    """Replace path contents atomically so partial writes never survive."""
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_trajectory_csv(path: str, traj: Trajectory, z: np.ndarray) -> None:
    """Columns: index, time, y_true, z, d0..dm (ground-truth derivatives)."""
    if z.shape != (traj.n,):
        raise ValueError(f"observations have shape {z.shape}, trajectory has n={traj.n}")
    m = traj.m
    header = ["index", "time", "y_true", "z"] + [f"d{d}" for d in range(m + 1)]
    lines = [",".join(header)]
    for i in range(traj.n):
        row = [str(i + 1), repr(float(traj.times[i])), repr(float(traj.y[i])), repr(float(z[i]))]
        row += [repr(float(traj.states[i, d])) for d in range(m + 1)]
        lines.append(",".join(row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_trajectory_csv(path: str) -> dict:
    """Load a trajectory CSV back into arrays keyed by column name."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path} is empty")
        cols = {name: [] for name in header}
        for row in reader:
            for name, value in zip(header, row):
                cols[name].append(float(value))
    return {name: np.asarray(values) for name, values in cols.items()}
