"""Sampling of spiked signal-plus-noise matrices.

Model: (1/sqrt(m)) X_tilde = sum_i theta_i u_i v_i' + (1/sqrt(m)) X with an
n x m noise matrix X of i.i.d. unit-variance entries and signal strengths
calibrated as theta_i = tau_i * beta^(1/4) * (1 + eps_i), beta = n/m.

Randomness is drawn from counter-based streams keyed by (seed, purpose, index),
so noise, signal, and probe draws never share state and reruns are bitwise
reproducible regardless of evaluation order.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ValidationError

__all__ = [
    "ModelConfig",
    "SpikedSample",
    "stream",
    "calibrate_signal_strengths",
    "sample_signal_vectors",
    "sample_noise",
    "assemble_spiked",
    "sample_model",
    "truncate_normalize",
]

SIGNAL_FAMILIES = ("gaussian_iid", "orthonormal")

# Purpose tags for derived RNG streams.
_PURPOSE = {"noise": 0, "signal": 1, "probe": 2}


def stream(seed, purpose, index=0):
    """Independent Generator for (seed, purpose, index); order-insensitive."""
    try:
        tag = _PURPOSE[purpose]
    except KeyError:
        raise ValidationError(f"unknown stream purpose {purpose!r}") from None
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(tag, int(index)))
    return np.random.default_rng(ss)


def _noise_drawer(family):
    """Resolve a noise family name to a (rng, shape) -> ndarray sampler.

    Families are concrete mean-0 variance-1 laws with finite fourth moment:
    'gaussian', 'rademacher', and 'student_t<df>' (df > 4, standardized).
    """
    if family == "gaussian":
        return lambda rng, shape: rng.standard_normal(shape)
    if family == "rademacher":
        return lambda rng, shape: rng.integers(0, 2, size=shape).astype(float) * 2.0 - 1.0
    if family.startswith("student_t"):
        try:
            df = int(family[len("student_t"):])
        except ValueError:
            raise ValidationError(f"bad noise family {family!r}") from None
        if df <= 4:
            raise ValidationError("student_t noise needs df > 4 for a finite fourth moment")
        scale = math.sqrt((df - 2.0) / df)
        return lambda rng, shape: rng.standard_t(df, size=shape) * scale
    raise ValidationError(f"unknown noise family {family!r}")


@dataclass(frozen=True)
class ModelConfig:
    """Complete description of one spiked ensemble draw."""

    n: int
    m: int
    r: int
    taus: tuple = ()
    eps: tuple = ()
    noise_family: str = "gaussian"
    signal_family: str = "gaussian_iid"
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "taus", tuple(float(t) for t in self.taus))
        eps = self.eps if len(self.eps) else (0.0,) * self.r
        object.__setattr__(self, "eps", tuple(float(e) for e in eps))
        if self.n <= 0 or self.m <= 0:
            raise ValidationError("n and m must be positive")
        if self.m < self.n:
            raise ValidationError("need m >= n (beta = n/m in (0, 1]); transpose your data")
        if self.r < 0 or self.r > min(self.n, self.m):
            raise ValidationError("need 0 <= r <= min(n, m)")
        if len(self.taus) != self.r or len(self.eps) != self.r:
            raise ValidationError("taus and eps must have length r")
        if any(t <= 0 for t in self.taus):
            raise ValidationError("spike parameters tau must be positive (drop zero spikes)")
        if any(t2 >= t1 for t1, t2 in zip(self.taus, self.taus[1:])):
            raise ValidationError("taus must be strictly decreasing")
        if not all(math.isfinite(e) for e in self.eps):
            raise ValidationError("eps must be finite")
        _noise_drawer(self.noise_family)
        if self.signal_family not in SIGNAL_FAMILIES:
            raise ValidationError(f"unknown signal family {self.signal_family!r}")

    @property
    def beta(self):
        return self.n / self.m

    def to_dict(self):
        return {
            "n": self.n,
            "m": self.m,
            "r": self.r,
            "taus": list(self.taus),
            "eps": list(self.eps),
            "noise_family": self.noise_family,
            "signal_family": self.signal_family,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            n=int(d["n"]),
            m=int(d["m"]),
            r=int(d["r"]),
            taus=tuple(d.get("taus", ())),
            eps=tuple(d.get("eps", ())),
            noise_family=d.get("noise_family", "gaussian"),
            signal_family=d.get("signal_family", "gaussian_iid"),
            seed=int(d.get("seed", 0)),
        )

    def replace(self, **kw):
        return replace(self, **kw)


def _freeze(a):
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class SpikedSample:
    """Realized factors of one draw; arrays are read-only after construction."""

    U: np.ndarray          # n x r left signal vectors
    V: np.ndarray          # m x r right signal vectors
    theta: np.ndarray      # r signal strengths
    X: np.ndarray          # n x m noise
    X_tilde: np.ndarray    # n x m observed (unscaled: divide by sqrt(m) for model form)
    config: ModelConfig = field(default=None, compare=False)

    def __post_init__(self):
        for name in ("U", "V", "theta", "X", "X_tilde"):
            object.__setattr__(self, name, _freeze(np.asarray(getattr(self, name), float)))

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def m(self):
        return self.X.shape[1]

    @property
    def r(self):
        return self.theta.shape[0]

    @property
    def beta(self):
        return self.n / self.m

    def scaled(self):
        """(1/sqrt(m)) X_tilde, the matrix in model form."""
        return self.X_tilde / math.sqrt(self.m)


def calibrate_signal_strengths(taus, eps, beta):
    """theta_i = tau_i * beta^(1/4) * (1 + eps_i), in the given order."""
    taus = np.asarray(taus, dtype=float)
    eps = np.asarray(eps, dtype=float)
    if taus.shape != eps.shape:
        raise ValidationError("taus and eps must have matching shapes")
    if not (0.0 < beta <= 1.0):
        raise ValidationError(f"beta must be in (0, 1], got {beta}")
    if np.any(np.diff(taus) >= 0):
        raise ValidationError("taus must be strictly decreasing")
    if not np.all(np.isfinite(eps)):
        raise ValidationError("eps must be finite")
    return taus * beta ** 0.25 * (1.0 + eps)


def sample_signal_vectors(n, m, r, signal_family, rng):
    """Draw (U, V) signal vectors.

    gaussian_iid: U = G_u / sqrt(n), V = G_v / sqrt(m) with standard normal
    entries (columns concentrate near unit norm). orthonormal: exactly
    orthonormal columns from a QR factorization of a Gaussian matrix.
    """
    if r > min(n, m):
        raise ValidationError("need r <= min(n, m)")
    if signal_family not in SIGNAL_FAMILIES:
        raise ValidationError(f"unknown signal family {signal_family!r}")
    if r == 0:
        return np.zeros((n, 0)), np.zeros((m, 0))
    rng_u, rng_v = rng.spawn(2)
    gu = rng_u.standard_normal((n, r))
    gv = rng_v.standard_normal((m, r))
    if signal_family == "gaussian_iid":
        return gu / math.sqrt(n), gv / math.sqrt(m)
    return _orthonormalize(gu), _orthonormalize(gv)


def _orthonormalize(g):
    q, rmat = np.linalg.qr(g)
    # Fix the QR sign ambiguity so the draw is a deterministic function of g.
    signs = np.sign(np.diag(rmat))
    signs[signs == 0] = 1.0
    return q * signs


def sample_noise(n, m, noise_family, rng):
    """n x m matrix of i.i.d. mean-0 variance-1 draws from the named family."""
    if n <= 0 or m <= 0:
        raise ValidationError("n and m must be positive")
    return _noise_drawer(noise_family)(rng, (n, m))


def assemble_spiked(U, V, theta, X, config=None):
    """Combine factors into a SpikedSample with X_tilde = sqrt(m) U diag(theta) V' + X."""
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    X = np.asarray(X, dtype=float)
    n, m = X.shape
    r = theta.shape[0]
    if U.shape != (n, r) or V.shape != (m, r):
        raise ValidationError(
            f"shape mismatch: U {U.shape}, V {V.shape}, theta {theta.shape}, X {X.shape}"
        )
    if r == 0:
        x_tilde = X.copy()
    else:
        x_tilde = math.sqrt(m) * ((U * theta) @ V.T) + X
    return SpikedSample(U=U, V=V, theta=theta, X=X, X_tilde=x_tilde, config=config)


def sample_model(config, trial_index=0):
    """Draw one SpikedSample; deterministic in (config.seed, trial_index)."""
    theta = calibrate_signal_strengths(config.taus, config.eps, config.beta)
    U, V = sample_signal_vectors(
        config.n, config.m, config.r, config.signal_family,
        stream(config.seed, "signal", trial_index),
    )
    X = sample_noise(
        config.n, config.m, config.noise_family,
        stream(config.seed, "noise", trial_index),
    )
    return assemble_spiked(U, V, theta, X, config=config)


def truncation_threshold(n, m):
    """delta_nm * (n*m)^(1/4) with delta_nm = max((n*m)^(-1/16), 1/log(n*m))."""
    nm = float(n) * float(m)
    delta = max(nm ** (-1.0 / 16.0), 1.0 / math.log(nm))
    return delta * nm ** 0.25


def truncate_normalize(X):
    """Zero out entries beyond the truncation threshold, then standardize.

    Centering and scaling use the empirical mean and standard deviation of the
    truncated matrix (the law quantities are unavailable at runtime; the
    plug-in differs by O((n*m)^(-1/2))).
    """
    X = np.asarray(X, dtype=float)
    n, m = X.shape
    thr = truncation_threshold(n, m)
    clipped = np.where(np.abs(X) <= thr, X, 0.0)
    mu = clipped.mean()
    sd = clipped.std()
    if sd <= 0.0 or not math.isfinite(sd):
        raise ValidationError("truncation left a degenerate (constant) matrix")
    return (clipped - mu) / sd
