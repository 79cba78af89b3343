"""Closed-form Marchenko-Pastur analytics at finite aspect ratio beta = n/m.

Conventions: eigenvalues are those of the scaled Gram matrix (1/m) X X' with
unit-variance noise, so the bulk support is [(1-sqrt(beta))^2, (1+sqrt(beta))^2]
and beta lies in (0, 1] (wide matrices; callers transpose tall data first).

Derivatives follow the calculus sign convention d/dz (lam - z)^(-1) = +(lam - z)^(-2),
so the Stieltjes transform has positive derivative on the real axis beyond the bulk.
"""

import cmath
import math

import numpy as np

from .errors import DomainError, ValidationError

__all__ = [
    "bulk_edges",
    "stieltjes",
    "d_transform",
    "d_transform_inverse",
    "density",
]


def _check_beta(beta):
    if not (0.0 < beta <= 1.0):
        raise ValidationError(f"aspect ratio beta must be in (0, 1], got {beta}")


def bulk_edges(beta):
    """Support endpoints ((1-sqrt(beta))^2, (1+sqrt(beta))^2) of the noise bulk."""
    _check_beta(beta)
    rt = math.sqrt(beta)
    return (1.0 - rt) ** 2, (1.0 + rt) ** 2


def _inside_bulk(z, beta):
    a, b = bulk_edges(beta)
    return a < z < b


def _small_root(b_coef, c_coef, disc):
    # Stable smaller-modulus root of a*x^2 + b*x + c: form q = -(b + s*sqrt(disc))/2
    # with the sign s chosen to avoid cancellation; then x_small = c/q. The
    # smaller-modulus root is the physical branch of both transforms below
    # (the bulk cut maps onto a circle of constant modulus, and the branch
    # vanishing at infinity stays strictly inside it). When the discriminant
    # vanishes (bulk edges) q degrades gracefully to the double root.
    sq = cmath.sqrt(disc)
    if (b_coef.conjugate() * sq).real < 0.0:
        sq = -sq
    q = -0.5 * (b_coef + sq)
    return c_coef / q


def stieltjes(z, beta):
    """Stieltjes transform and derivative of the Marchenko-Pastur law.

    Solves beta*z*s^2 + (z + beta - 1)*s + 1 = 0 on the branch with
    s ~ -1/z at infinity; the derivative comes from implicit differentiation.
    Real z strictly inside the bulk raises DomainError; at the edges the
    transform is finite but its derivative diverges.
    """
    _check_beta(beta)
    zc = complex(z)
    real_input = zc.imag == 0.0
    if real_input and _inside_bulk(zc.real, beta):
        raise DomainError(f"z={z} lies inside the bulk support")
    if zc == 0.0:
        if beta == 1.0:
            raise DomainError("z=0 is the lower bulk edge when beta=1")
        s = 1.0 / (1.0 - beta)
        return s, 1.0 / (1.0 - beta) ** 3

    b_coef = zc + beta - 1.0
    disc = b_coef * b_coef - 4.0 * beta * zc
    s = _small_root(b_coef, 1.0, disc)

    denom = 2.0 * beta * zc * s + zc + beta - 1.0
    if denom == 0.0:
        ds = complex(math.inf)
    else:
        ds = -(beta * s * s + s) / denom

    if real_input:
        return s.real, ds.real
    return s, ds


def d_transform(z, beta):
    """D-transform of the noise spectrum (product of the two companion transforms).

    Closed form -(1 + beta - z + sqrt((1 + beta - z)^2 - 4*beta)) / (2*beta),
    i.e. the smaller-modulus root of beta*D^2 + (1 + beta - z)*D + 1 = 0.
    Maps ((1+sqrt(beta))^2, inf) decreasingly onto (0, 1/sqrt(beta)).
    """
    _check_beta(beta)
    zc = complex(z)
    real_input = zc.imag == 0.0
    if real_input and _inside_bulk(zc.real, beta):
        raise DomainError(f"z={z} lies inside the bulk support")

    b_coef = 1.0 + beta - zc
    disc = b_coef * b_coef - 4.0 * beta
    d = _small_root(b_coef, 1.0, disc)
    if real_input:
        return d.real
    return d


def d_transform_inverse(t, beta):
    """Closed-form inverse (t+1)(beta*t+1)/t of the D-transform on (0, beta^(-1/2))."""
    _check_beta(beta)
    if not (0.0 < t < beta ** -0.5):
        raise DomainError(
            f"t={t} outside the invertibility range (0, {beta ** -0.5:.6g})"
        )
    return (t + 1.0) * (beta * t + 1.0) / t


def density(x, beta):
    """Marchenko-Pastur density sqrt((b-x)(x-a)) / (2*pi*beta*x) on [a, b], else 0."""
    _check_beta(beta)
    a, b = bulk_edges(beta)
    x = np.asarray(x, dtype=float)
    inside = (x > a) & (x < b)
    out = np.zeros_like(x)
    xi = x[inside]
    out[inside] = np.sqrt((b - xi) * (xi - a)) / (2.0 * math.pi * beta * xi)
    if out.ndim == 0:
        return float(out)
    return out
