"""Monte Carlo moments of the interior whole-plane map derivative.

Independent of the series/closed-form modules on purpose: the finite-horizon
interior map is built by composing frozen-driving elementary flows
dz/ds = z (z + u)/(z - u) (latest increment applied first, which is the
backward-characteristic order), with the log-derivative integrated along the
same trajectory.  The moment estimator is the sample mean of
exp(q (T + Re log F')) at the rotated point w e^{i B(T)}.
"""
from __future__ import annotations

import cmath
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

_MAX_DELTA = 1e-2
_D_FLOOR = 1e-12
_C_SUB = 0.2          # substep cap h <= _C_SUB * |z-u|^2
_CHUNK = 2048
_MAX_SUBSTEPS = 200000


class StepUnderflowError(RuntimeError):
    """Trajectory approached the driving singularity beyond recovery."""


@dataclass(frozen=True)
class DrivingPath:
    u: np.ndarray        # frozen driving per increment, time order
    delta: float
    b_total: float       # B(T)


@dataclass(frozen=True)
class MCConfig:
    kappa: float
    q: float
    T: float
    n_steps: int
    n_samples: int
    seed: int
    w: complex

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError("kappa must be nonnegative")
        if self.T <= 0 or self.n_steps < 1 or self.n_samples < 1:
            raise ValueError("T, n_steps, n_samples must be positive")
        if self.delta > _MAX_DELTA * (1 + 1e-12):
            raise ValueError(
                f"delta = T/n_steps = {self.delta:.3e} exceeds {_MAX_DELTA}")
        aw = abs(complex(self.w))
        if aw >= 1:
            raise ValueError("|w| must be below 1")
        if math.exp(-self.T) > (1 - aw) / 10 + 1e-300:
            raise ValueError(
                f"horizon too short: need exp(-T) <= (1-|w|)/10 = {(1 - aw) / 10:.3e}")

    @property
    def delta(self) -> float:
        return self.T / self.n_steps


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    n_samples: int
    seed: int


# ---- driving ----

def sample_driving(kappa: float, T: float, n_steps: int,
                   stream: np.random.Generator) -> DrivingPath:
    """Brownian driving on the circle: B(t_0) = 0, var kappa * delta per step.

    u_k freezes e^{i B} at the right endpoint t_k of each increment.
    """
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    delta = T / n_steps
    inc = stream.standard_normal(n_steps) * math.sqrt(kappa * delta)
    B = np.cumsum(inc)
    return DrivingPath(u=np.exp(1j * B), delta=delta, b_total=float(B[-1]))


# ---- elementary frozen-driving flow ----

def _field(z, u):
    return z * (z + u) / (z - u)


def _dlog_field(z, u):
    return (z * z - 2 * u * z - u * u) / (z - u) ** 2


def _advance(z: np.ndarray, logd: np.ndarray, u, delta: float):
    """One frozen-driving increment for a batch of lanes, adaptive RK4.

    Substeps shrink quadratically with the distance to the singularity u so
    intermediate stages cannot jump across it; lanes finish independently.
    """
    rem = np.full(z.shape, delta)
    u_arr = np.asarray(u)
    per_lane = u_arr.ndim > 0
    iters = 0
    while True:
        idx = np.flatnonzero(rem > 0)
        if idx.size == 0:
            return z, logd
        zi = z[idx]
        ui = u_arr[idx] if per_lane else u_arr
        d = np.abs(zi - ui)
        if np.any(d < _D_FLOOR):
            raise StepUnderflowError(
                f"substep underflow: |z - u| < {_D_FLOOR} during increment")
        h = np.minimum(rem[idx], _C_SUB * d * d)
        k1 = _field(zi, ui)
        l1 = _dlog_field(zi, ui)
        z2 = zi + 0.5 * h * k1
        k2 = _field(z2, ui)
        l2 = _dlog_field(z2, ui)
        z3 = zi + 0.5 * h * k2
        k3 = _field(z3, ui)
        l3 = _dlog_field(z3, ui)
        z4 = zi + h * k3
        k4 = _field(z4, ui)
        l4 = _dlog_field(z4, ui)
        z[idx] = zi + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        logd[idx] = logd[idx] + (h / 6.0) * (l1 + 2 * l2 + 2 * l3 + l4)
        rem[idx] -= h
        iters += 1
        if iters > _MAX_SUBSTEPS:
            raise StepUnderflowError("substep underflow: iteration cap hit")


def elementary_step(z, logd, u, delta: float):
    """Advance (z, log-derivative) through one frozen-driving increment.

    Accepts scalars or matching 1-d arrays; delta = 0 is the identity.
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    scalar = np.ndim(z) == 0
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex)).copy()
    l_arr = np.atleast_1d(np.asarray(logd, dtype=complex)).copy()
    if delta > 0:
        z_arr, l_arr = _advance(z_arr, l_arr, complex(u) if np.ndim(u) == 0 else u,
                                float(delta))
    if scalar:
        return complex(z_arr[0]), complex(l_arr[0])
    return z_arr, l_arr


def conic_flow(w, T: float):
    """Exact endpoint and w-derivative of the constant-driving flow (u = 1).

    (z+1)^2/z grows as e^s along dz/ds = z(z+u)/(z-u) at u = 1, which pins
    the endpoint algebraically: z_T solves z^2 + (2 - K e^T) z + 1 = 0 with
    K = (w+1)^2/w, small root.  Returns (z_T, dz_T/dw).
    """
    w = complex(w)
    if abs(w) >= 1.0:
        raise ValueError(f"need |w| < 1, got {abs(w)}")
    if w == 0:
        return 0j, complex(math.exp(-T))
    E = math.exp(T)
    b = (w + 1.0) ** 2 / w * E - 2.0
    s = cmath.sqrt(b * b - 4.0)
    big = (b + s) / 2.0
    if abs(big) < 1.0:
        big = (b - s) / 2.0
    z = 1.0 / big     # roots multiply to 1; avoids b - sqrt cancellation
    dz = E * (w * w - 1.0) * z * z / (w * w * (z * z - 1.0))
    return z, dz


# ---- finite-horizon interior map ----

def whole_plane_map_derivative(w, path: DrivingPath):
    """F(w e^{i B(T)}, T) and log of its derivative in the first argument.

    Increments compose latest-first.  Log-space throughout: the raw value
    contracts like e^{-T}.  w may be a scalar or a 1-d array (one shared
    driving path).
    """
    scalar = np.ndim(w) == 0
    z = np.atleast_1d(np.asarray(w, dtype=complex)) * np.exp(1j * path.b_total)
    logd = np.zeros(z.shape, dtype=complex)
    z = z.copy()
    for k in range(len(path.u) - 1, -1, -1):
        z, logd = _advance(z, logd, complex(path.u[k]), path.delta)
    if scalar:
        return complex(z[0]), complex(logd[0])
    return z, logd


def _flow_chunk(w: complex, T: float, n_steps: int, kappa: float,
                seeds) -> tuple:
    delta = T / n_steps
    m = len(seeds)
    inc = np.empty((m, n_steps))
    for row, ss in enumerate(seeds):
        gen = np.random.Generator(np.random.PCG64(ss))
        inc[row] = gen.standard_normal(n_steps)
    inc *= math.sqrt(kappa * delta)
    B = np.cumsum(inc, axis=1)
    bT = B[:, -1].copy()
    U = np.exp(1j * B)
    del inc, B
    z = w * np.exp(1j * bT)
    logd = np.zeros(m, dtype=complex)
    for k in range(n_steps - 1, -1, -1):
        z, logd = _advance(z, logd, U[:, k], delta)
    return logd, bT


def moment_estimate(config: MCConfig, dump=None, threads: int = 1) -> MCEstimate:
    """Sample mean and stderr of exp(q (T + Re log F')).

    Per-path RNG streams are spawned from the seed, so the estimate is
    independent of chunking and thread count, and bit-identical per seed.
    Optional dump: one `index log_deriv_re log_deriv_im B_T` line per path.
    """
    if abs(config.q) > 2 or abs(complex(config.w)) > 0.9:
        warnings.warn("outside the validated envelope |q| <= 2, |w| <= 0.9",
                      RuntimeWarning, stacklevel=2)
    root = np.random.SeedSequence(config.seed)
    children = root.spawn(config.n_samples)
    spans = [(a, min(a + _CHUNK, config.n_samples))
             for a in range(0, config.n_samples, _CHUNK)]

    def work(span):
        a, b = span
        return _flow_chunk(complex(config.w), config.T,
                           config.n_steps, config.kappa, children[a:b])

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(work, spans))
    else:
        parts = [work(s) for s in spans]
    logd = np.concatenate([p[0] for p in parts])
    bT = np.concatenate([p[1] for p in parts])
    X = np.exp(config.q * (config.T + logd.real))
    if not np.all(np.isfinite(X)):
        raise OverflowError(
            "sample overflow in the moment estimator; reduce |q| or |w|")
    mean = float(np.mean(X))
    stderr = float(np.std(X, ddof=1) / math.sqrt(config.n_samples)) \
        if config.n_samples > 1 else math.inf
    if stderr > 0.5 * abs(mean):
        warnings.warn("estimate not converged: stderr exceeds mean/2",
                      RuntimeWarning, stacklevel=2)
    if dump is not None:
        own = not hasattr(dump, "write")
        fh = open(dump, "w") if own else dump
        try:
            for i in range(config.n_samples):
                fh.write("%d %.17g %.17g %.17g\n"
                         % (i, logd.real[i], logd.imag[i], bT[i]))
        finally:
            if own:
                fh.close()
    return MCEstimate(mean=mean, stderr=stderr, n_samples=config.n_samples,
                      seed=config.seed)
