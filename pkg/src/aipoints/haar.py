"""Haar sampling on SL(2)+- truncated to operator-norm balls.

Cartan (K A K) coordinates: M = R(theta1) diag(e^t, e^-t) R(theta2), t >= 0,
optionally right-multiplied by diag(1, -1) to reach the det = -1 component.
The radial Haar density is sinh(2t); both angles are uniform and the
reflection is a fair coin.  Truncation to S_R restricts t to [0, log R] and
the total mass of S_R is fixed to the sinh integral, so the proposal equals
the truncated target and the base importance weight is that constant mass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidRadius, TruncationTooSmall
from .unimodular import (UnimodularMap, VolumePreservingAffineMap,
                         batch_operator_norm, singular_values)

__all__ = [
    "CartanCoordinates",
    "HaarSample",
    "InvarianceResult",
    "haar_density_cartan",
    "truncated_mass",
    "truncated_cdf",
    "sample_sl2pm",
    "sample_translation",
    "smoothed_ball_indicator",
    "invariance_check",
]


def haar_density_cartan(t):
    """Radial Haar density sinh(2t) in Cartan coordinates (t >= 0)."""
    return np.sinh(2.0 * np.asarray(t, float))


def truncated_mass(radius: float) -> float:
    """integral of sinh(2t) over [0, log R]: the mass assigned to S_R."""
    if radius < 1.0:
        raise InvalidRadius(f"truncation radius must be >= 1, got {radius}")
    return float(0.5 * (np.cosh(2.0 * np.log(radius)) - 1.0))


def truncated_cdf(t, radius: float):
    """CDF of the radial coordinate on [0, log R]."""
    tmax = np.log(radius)
    tt = np.clip(np.asarray(t, float), 0.0, tmax)
    return (np.cosh(2.0 * tt) - 1.0) / (np.cosh(2.0 * tmax) - 1.0)


def _sample_cartan(radius: float, rng: np.random.Generator, n: int):
    """Vectorized Cartan draws: (theta1, t, theta2, reflect) arrays.

    Inverse-CDF in t; the rng call order (theta1, t, theta2, reflect) is part
    of the determinism contract.
    """
    if radius <= 1.0:
        raise InvalidRadius(f"sampling needs truncation radius > 1, got {radius}")
    span = np.cosh(2.0 * np.log(radius)) - 1.0
    theta1 = rng.random(n) * (2.0 * np.pi)
    t = 0.5 * np.arccosh(1.0 + rng.random(n) * span)
    theta2 = rng.random(n) * (2.0 * np.pi)
    reflect = rng.random(n) < 0.5
    return theta1, t, theta2, reflect


def _decode_cartan(theta1, t, theta2, reflect):
    """Matrices and exact inverses for a batch of Cartan coordinates."""
    c1, s1 = np.cos(theta1), np.sin(theta1)
    c2, s2 = np.cos(theta2), np.sin(theta2)
    et, em = np.exp(t), np.exp(-t)
    m = np.empty(t.shape + (2, 2))
    m[..., 0, 0] = c1 * c2 * et - s1 * s2 * em
    m[..., 0, 1] = -c1 * s2 * et - s1 * c2 * em
    m[..., 1, 0] = s1 * c2 * et + c1 * s2 * em
    m[..., 1, 1] = -s1 * s2 * et + c1 * c2 * em
    m[..., :, 1] = np.where(reflect[..., None], -m[..., :, 1], m[..., :, 1])
    # adjugate over the analytic det sign (+1, or -1 on the reflected coset)
    sign = np.where(reflect, -1.0, 1.0)[..., None, None]
    minv = np.empty_like(m)
    minv[..., 0, 0] = m[..., 1, 1]
    minv[..., 0, 1] = -m[..., 0, 1]
    minv[..., 1, 0] = -m[..., 1, 0]
    minv[..., 1, 1] = m[..., 0, 0]
    return m, minv * sign


@dataclass(frozen=True)
class CartanCoordinates:
    theta1: float
    t: float
    theta2: float
    reflect: bool

    def decode(self) -> UnimodularMap:
        m, _ = _decode_cartan(np.asarray(self.theta1), np.asarray(self.t),
                              np.asarray(self.theta2), np.asarray(self.reflect))
        return UnimodularMap(m)


@dataclass(frozen=True)
class HaarSample:
    """A group sample together with its base importance weight."""
    phi: VolumePreservingAffineMap
    base_weight: float
    coords: CartanCoordinates


def sample_sl2pm(radius: float, rng: np.random.Generator) -> HaarSample:
    """One Haar draw from S_R in SL(2)+- (translation part zero).

    The proposal equals the truncated target, so the base weight is the
    constant truncated mass of S_R.
    """
    theta1, t, theta2, reflect = _sample_cartan(radius, rng, 1)
    m, _ = _decode_cartan(theta1, t, theta2, reflect)
    coords = CartanCoordinates(float(theta1[0]), float(t[0]), float(theta2[0]),
                               bool(reflect[0]))
    phi = VolumePreservingAffineMap(UnimodularMap(m[0]), np.zeros(2))
    return HaarSample(phi=phi, base_weight=truncated_mass(radius), coords=coords)


def _sample_disk(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform draws from the unit disk; call order (radius, angle) is fixed."""
    r = np.sqrt(rng.random(n))
    ang = rng.random(n) * (2.0 * np.pi)
    return np.stack([r * np.cos(ang), r * np.sin(ang)], axis=-1)


def sample_translation(rho: float, rng: np.random.Generator) -> tuple[np.ndarray, float]:
    """Uniform draw from the disk of radius rho; weight is its Lebesgue mass."""
    if rho <= 0:
        raise ValueError("translation radius must be positive")
    return rho * _sample_disk(rng, 1)[0], float(np.pi * rho * rho)


def smoothed_ball_indicator(radius: float, width: float = 0.1):
    """A compactly supported test function on SL(2)+-.

    1 inside S_{R(1-width)}, 0 outside S_R, linear in the operator norm in
    between.  Accepts (..., 2, 2) stacks.
    """
    lo = radius * (1.0 - width)

    def h(mats: np.ndarray) -> np.ndarray:
        lam1 = batch_operator_norm(np.asarray(mats, float))
        return np.clip((radius - lam1) / (radius - lo), 0.0, 1.0)

    return h


@dataclass(frozen=True)
class InvarianceResult:
    discrepancy: float
    std_error: float


def invariance_check(g, h, support_radius: float, samples: int,
                     rng: np.random.Generator,
                     truncation_radius: float | None = None) -> InvarianceResult:
    """Estimate |E[h(g M)] - E[h(M)]| over Haar measure on S_truncation.

    ``h`` must vanish outside S_{support_radius} and accept (..., 2, 2)
    stacks.  Left invariance needs the truncation to cover g^{-1} S_{support};
    for |det g| = 1 that means truncation >= ||g|| * support_radius.  Two
    independent sample sets feed the two sides.

    Raises
    ------
    TruncationTooSmall
        If ``truncation_radius`` is given but below ||g|| * support_radius.
    """
    gmat = g.matrix if isinstance(g, UnimodularMap) else np.asarray(g, float)
    gnorm = singular_values(gmat).lam1
    needed = gnorm * support_radius
    if truncation_radius is None:
        truncation_radius = needed
    if truncation_radius < needed * (1.0 - 1e-12):
        raise TruncationTooSmall(
            f"need truncation radius >= {needed:.6g}, got {truncation_radius:.6g}")
    mass = truncated_mass(truncation_radius)

    def side(transform) -> tuple[float, float]:
        th1, t, th2, refl = _sample_cartan(truncation_radius, rng, samples)
        m, _ = _decode_cartan(th1, t, th2, refl)
        vals = np.asarray(h(transform(m)), float)
        return mass * float(vals.mean()), mass * float(vals.std(ddof=1) / np.sqrt(samples))

    plain, se_plain = side(lambda m: m)
    shifted, se_shifted = side(lambda m: np.einsum("ij,njk->nik", gmat, m))
    return InvarianceResult(
        discrepancy=abs(shifted - plain),
        std_error=float(np.hypot(se_plain, se_shifted)),
    )
