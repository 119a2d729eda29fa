"""Closed-form SLE/CLE constants shared by the whole package.

All values are plain double-precision reals; downstream use is numeric
tolerance checks, so no symbolic arithmetic is kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class SleParameters:
    """Constants attached to a choice of kappa in (2, 4).

    kappa_prime = 16/kappa is the non-simple companion parameter in (4, 8);
    theta_dbl is the double-point intersection angle (radians), d_sle the
    curve dimension 1 + kappa/8, d_dbl the double-point dimension of the
    kappa_prime curve, and alpha4 the simple-curve double-point (4-crossing)
    exponent, which stays above 2 for kappa < 4.
    """

    kappa: float
    kappa_prime: float
    lam: float
    chi: float
    theta_dbl: float
    d_sle: float
    d_dbl: float
    alpha4: float

    def as_dict(self) -> dict[str, float]:
        return {
            "kappa": self.kappa,
            "kappa_prime": self.kappa_prime,
            "lambda": self.lam,
            "chi": self.chi,
            "theta_dbl": self.theta_dbl,
            "d_sle": self.d_sle,
            "d_dbl": self.d_dbl,
            "alpha4": self.alpha4,
        }


def make_parameters(kappa: float) -> SleParameters:
    """Derive every stored constant from kappa.

    Raises ValueError outside the open interval (2, 4); kappa is the
    primary input and kappa_prime = 16/kappa is always derived from it.
    """
    kappa = float(kappa)
    if not 2.0 < kappa < 4.0:
        raise ValueError(f"kappa must lie in (2, 4), got {kappa!r}")
    kp = 16.0 / kappa
    sq = math.sqrt(kappa)
    lam = math.pi / sq
    chi = 2.0 / sq - sq / 2.0
    theta_dbl = math.pi * (kappa - 2.0) / (2.0 - kappa / 2.0)
    d_sle = 1.0 + kappa / 8.0
    d_dbl = 2.0 - (12.0 - kp) * (4.0 + kp) / (8.0 * kp)
    alpha4 = (12.0 - kappa) * (4.0 + kappa) / (8.0 * kappa)
    return SleParameters(
        kappa=kappa,
        kappa_prime=kp,
        lam=lam,
        chi=chi,
        theta_dbl=theta_dbl,
        d_sle=d_sle,
        d_dbl=d_dbl,
        alpha4=alpha4,
    )
