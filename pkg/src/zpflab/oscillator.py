"""Single harmonic-oscillator ground state: amplitude, width, sampling.

Works on plain positive reals in whatever unit system the caller uses;
hbar is passed in explicitly (typically from the active ConstantsTable).
The exact Gaussian variance hbar/(2 m omega) is the precise internal
quantity; ``fluctuation_width`` keeps the conventional order-of-magnitude
combination sqrt(hbar/(m omega)), which is larger by sqrt(2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import DomainError

QUADRATURE_NODES = 2**14 + 1  # composite Simpson node count (odd)
QUADRATURE_HALF_WIDTH = 12.0  # support half-width in units of the Gaussian sigma


@dataclass(frozen=True)
class OscillatorParams:
    m: float
    omega: float
    hbar: float

    def __post_init__(self):
        for name in ("m", "omega", "hbar"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise DomainError(f"oscillator parameter {name} must be finite and > 0, got {v!r}")
            object.__setattr__(self, name, float(v))


def ground_state_psi(x, p: OscillatorParams):
    """Ground-state amplitude (m omega / pi hbar)^(1/4) exp(-m omega x^2 / 2 hbar).

    Accepts a scalar or array x; strictly positive and even in x.
    """
    a = p.m * p.omega / p.hbar
    return (a / math.pi) ** 0.25 * np.exp(-0.5 * a * np.asarray(x, dtype=float) ** 2)


def fluctuation_width(p: OscillatorParams) -> float:
    """sqrt(hbar / (m omega)), the conventional fluctuation extent."""
    return math.sqrt(p.hbar / (p.m * p.omega))


def position_variance(p: OscillatorParams) -> float:
    """Exact variance of |psi|^2: hbar / (2 m omega) = fluctuation_width^2 / 2."""
    return p.hbar / (2.0 * p.m * p.omega)


def sample_positions(p: OscillatorParams, seed: int, n: int) -> np.ndarray:
    """n deterministic draws from |psi|^2 (zero-mean Gaussian)."""
    if n < 1:
        raise DomainError(f"sample count must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    return rng.normal(0.0, math.sqrt(position_variance(p)), size=int(n))


def normalization_quadrature(
    p: OscillatorParams,
    half_width_sigmas: float = QUADRATURE_HALF_WIDTH,
    nodes: int = QUADRATURE_NODES,
) -> float:
    """Composite-Simpson integral of |psi|^2 over +-half_width_sigmas sigma.

    Should equal 1 to ~1e-10 for any valid parameters; used as a
    self-consistency check of the analytic normalization.
    """
    sigma = math.sqrt(position_variance(p))
    x = np.linspace(-half_width_sigmas * sigma, half_width_sigmas * sigma, nodes)
    return float(simpson(ground_state_psi(x, p) ** 2, x=x))
