"""Polar user region, quantization thresholds, and Poisson deployments.

Users live in a circular sector described by an inner radius, an outer
radius, and a center angle around the beam direction.  The number of users
is Poisson with mean proportional to the sector area; positions are
uniform over the sector, which makes the angle uniform and the squared
distance uniform.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class UserRegion:
    """Sector geometry: radii in meters, angles in radians.

    ``delta`` is the full center angle of the sector; ``theta_bar`` is the
    beam (sector bisector) direction.
    """

    d_min: float
    d_max: float
    delta: float
    theta_bar: float = 0.0

    def __post_init__(self):
        if not self.d_min >= 0.0:
            raise ValueError(f"d_min must be >= 0, got {self.d_min}")
        if not self.d_max > self.d_min:
            raise ValueError(f"d_max must exceed d_min, got {self.d_max} <= {self.d_min}")
        if not 0.0 < self.delta <= np.pi:
            raise ValueError(f"delta must be in (0, pi], got {self.delta}")

    @property
    def half_angle(self):
        return self.delta / 2.0

    @property
    def area_measure(self):
        """Integral of r dr dtheta over the sector: (d_max^2 - d_min^2) * delta / 2."""
        return (self.d_max**2 - self.d_min**2) * self.delta / 2.0


@dataclass(frozen=True)
class Thresholds:
    """Quantizer levels: distance threshold (m) and angle threshold (rad)."""

    d_th: float
    theta_th: float
    c_d: float
    c_theta: float

    def __post_init__(self):
        if not 0.0 <= self.c_d <= 1.0:
            raise ValueError(f"c_d must be in [0, 1], got {self.c_d}")
        if not 0.0 <= self.c_theta <= 1.0:
            raise ValueError(f"c_theta must be in [0, 1], got {self.c_theta}")


def thresholds_from_coefficients(region, c_d, c_theta):
    """Map unitless coefficients onto threshold levels.

    d_th = d_min + c_d (d_max - d_min) and theta_th = c_theta * delta / 2.
    Coefficients outside [0, 1] raise ValueError.
    """
    if not 0.0 <= c_d <= 1.0:
        raise ValueError(f"c_d must be in [0, 1], got {c_d}")
    if not 0.0 <= c_theta <= 1.0:
        raise ValueError(f"c_theta must be in [0, 1], got {c_theta}")
    return Thresholds(
        d_th=region.d_min + c_d * (region.d_max - region.d_min),
        theta_th=c_theta * region.half_angle,
        c_d=c_d,
        c_theta=c_theta,
    )


@dataclass(frozen=True)
class DeploymentModel:
    """Homogeneous PPP with the given density (users per square meter)."""

    density: float

    def __post_init__(self):
        if self.density < 0:
            raise ValueError(f"density must be >= 0, got {self.density}")

    def expected_count(self, region):
        return expected_count(region, self.density)


def expected_count(region, density):
    """Mean user count: (d_max^2 - d_min^2) * (delta/2) * density, delta in radians."""
    return region.area_measure * density


@dataclass(frozen=True)
class UserEquipment:
    """One sampled user: position (distance m, angle rad) and fading power."""

    distance: float
    angle: float
    fading_power: float


def membership_probabilities(region, thresholds):
    """(p_theta, p_d): probabilities that a uniform user is inside each threshold.

    p_theta = 2 theta_th / delta; p_d = (d_th^2 - d_min^2) / (d_max^2 - d_min^2).
    The distance form follows from the squared-distance being uniform; the
    plain difference without the ratio is not a probability.
    """
    p_theta = 2.0 * thresholds.theta_th / region.delta
    p_d = (thresholds.d_th**2 - region.d_min**2) / (region.d_max**2 - region.d_min**2)
    return p_theta, p_d


def sample_positions(region, count, rng, fading_variance=1.0):
    """Vectorized position/fading draws: (distances, angles, fading_powers).

    Angles are uniform on [theta_bar - delta/2, theta_bar + delta/2];
    distances use the inverse CDF of the density 2x/(d_max^2 - d_min^2),
    i.e. d = sqrt(d_min^2 + u (d_max^2 - d_min^2)); fading power is
    exponential with the given mean.  Draw order is fixed (angle, distance,
    fading) so identical generators give identical deployments.
    """
    angles = rng.uniform(
        region.theta_bar - region.half_angle,
        region.theta_bar + region.half_angle,
        size=count,
    )
    u = rng.random(count)
    distances = np.sqrt(region.d_min**2 + u * (region.d_max**2 - region.d_min**2))
    fading = rng.exponential(fading_variance, size=count)
    return distances, angles, fading


def sample_deployment(region, model, rng, fading_variance=1.0):
    """Draw one deployment: K ~ Poisson(mu) users, i.i.d. over the sector."""
    mu = model.expected_count(region)
    k = int(rng.poisson(mu))
    distances, angles, fading = sample_positions(region, k, rng, fading_variance)
    return [
        UserEquipment(distance=float(d), angle=float(a), fading_power=float(f))
        for d, a, f in zip(distances, angles, fading)
    ]
