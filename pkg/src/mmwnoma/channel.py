"""LoS mmWave channel: steering vectors, Fejer-kernel array gain, path loss.

The scalar effective channel gain |h^H w|^2 = |alpha|^2 F_M(theta_bar, theta)
/ PL(d) is the only channel quantity the rest of the framework consumes.
The steering phase uses sin(theta) throughout, which makes the beamforming
gain of an M-element half-wavelength array exactly the Fejer kernel in
sin(theta_bar) - sin(theta).
"""

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ArrayConfig:
    """Uniform linear array: element count and spacing in wavelengths."""

    num_elements: int
    element_spacing_over_wavelength: float = 0.5

    def __post_init__(self):
        if self.num_elements < 1:
            raise ValueError(f"num_elements must be >= 1, got {self.num_elements}")
        if self.element_spacing_over_wavelength <= 0:
            raise ValueError("element spacing ratio must be positive")


@dataclass(frozen=True)
class LinkBudget:
    """Transmit SNR (linear), path-loss exponent, fading power variance."""

    snr_linear: float
    path_loss_exponent: float = 2.0
    fading_variance: float = 1.0
    num_paths: int = 1

    def __post_init__(self):
        if self.snr_linear <= 0:
            raise ValueError(f"snr_linear must be > 0, got {self.snr_linear}")
        if self.path_loss_exponent < 0:
            raise ValueError("path_loss_exponent must be >= 0")
        if self.fading_variance <= 0:
            raise ValueError("fading_variance must be > 0")
        if self.num_paths != 1:
            raise ValueError("only the single-path (LoS) channel is supported")

    @classmethod
    def from_snr_db(cls, snr_db, **kwargs):
        return cls(snr_linear=10.0 ** (snr_db / 10.0), **kwargs)


def fejer_kernel(array, theta_bar, theta):
    """Normalized array-factor power |sin(pi M u / 2) / (M sin(pi u / 2))|^2.

    u = sin(theta_bar) - sin(theta).  Values lie in [0, 1] with unit peaks at
    u = 0 (and the aliased u = +-2).  Near a peak the 0/0 form is resolved by
    the exact limit 1 (|sin(pi u/2)| < 1e-12) or a stable evaluation around
    the wrapped offset (|sin(pi u/2)| < 1e-6).
    """
    m = array.num_elements
    theta = np.asarray(theta, dtype=float)
    u = np.sin(theta_bar) - np.sin(theta)
    # wrap to the nearest peak; the squared kernel is 2-periodic in u
    u = u - 2.0 * np.round(u / 2.0)
    z = 0.5 * np.pi * u
    s = np.sin(z)
    abs_s = np.abs(s)
    at_peak = abs_s < 1e-12
    near_peak = abs_s < 1e-6
    z_safe = np.where(at_peak, 1.0, z)
    s_safe = np.where(at_peak, 1.0, s)
    # near the peak sin(pi u/2) ~ pi u/2, so dividing by z instead of s is
    # exact to O(z^2) and free of cancellation
    ratio = np.where(
        near_peak,
        np.sin(m * z_safe) / (m * z_safe),
        np.sin(m * z_safe) / (m * s_safe),
    )
    out = np.where(at_peak, 1.0, ratio**2)
    out = np.clip(out, 0.0, 1.0)
    if np.ndim(theta) == 0:
        return float(out)
    return out


def steering_vector(array, theta):
    """Unit-norm ULA steering vector, m-th element exp(-j 2 pi (d/l)(m-1) sin theta)/sqrt(M)."""
    m = array.num_elements
    phase = (
        -2j
        * np.pi
        * array.element_spacing_over_wavelength
        * np.arange(m)
        * np.sin(theta)
    )
    return np.exp(phase) / np.sqrt(m)


def path_loss(distance, gamma):
    """Linear attenuation d^gamma (larger = weaker); PL(0) = 0 is legal."""
    return np.asarray(distance, dtype=float) ** gamma


def effective_gain(ue, array, budget, theta_bar):
    """Scalar channel quality |alpha|^2 F_M(theta_bar, theta) / d^gamma.

    A user at distance 0 gets an infinite-gain sentinel; downstream rate
    logic treats it as never-in-outage (a measure-zero event under the
    sampling distribution).
    """
    if ue.distance == 0.0:
        return math.inf
    kernel = fejer_kernel(array, theta_bar, ue.angle)
    return ue.fading_power * kernel / float(path_loss(ue.distance, budget.path_loss_exponent))


def effective_gain_array(distances, angles, fading, array, budget, theta_bar):
    """Vectorized effective gain; zero distances map to +inf."""
    kernel = fejer_kernel(array, theta_bar, angles)
    pl = path_loss(distances, budget.path_loss_exponent)
    with np.errstate(divide="ignore"):
        return np.where(pl > 0.0, fading * kernel / np.where(pl > 0.0, pl, 1.0), np.inf)
