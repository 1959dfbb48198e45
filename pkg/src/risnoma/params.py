"""System-model parameters and unit conversions."""

import dataclasses
import math
from dataclasses import dataclass

from .errors import ConfigError

__all__ = ["NetworkParams", "dbm_to_watts", "watts_to_dbm", "db_to_linear", "linear_to_db"]


def dbm_to_watts(dbm):
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts):
    return 10.0 * math.log10(watts) + 30.0


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


def linear_to_db(x):
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class NetworkParams:
    """Scalar parameters of the RIS-aided two-user NOMA downlink.

    Powers are linear watts, distances meters, densities per square meter.
    Defaults are the numerical settings used for the coverage figures; the
    connected-user distance ``r_c``, the interference fraction ``rho_t`` and
    the angle split ``rho_a`` are not given there and are chosen here.

    The user density only shapes where the typical user is drawn from and
    never enters a formula, so it is not stored.
    """

    lambda_b: float = 1.0 / (300.0**2 * math.pi)
    R_L: float = 25.0
    r_c: float = 50.0
    P_b: float = dbm_to_watts(10.0)
    sigma2: float = dbm_to_watts(-90.0)
    a_c: float = 0.6
    a_t: float = 0.4
    alpha_c: float = 4.0
    alpha_t: float = 2.4
    C: float = 1.0
    L: float = 0.75
    m_t: int = 4
    m_c: int = 4
    rho_t: float = 1.0
    rho_a: float = 0.5
    gamma_sic_th: float = 1e-2
    gamma_t_th: float = 1e-2
    gamma_c_th: float = 1e-2
    B_w: float = 10e6

    def __post_init__(self):
        self.validate()

    def validate(self):
        """Raise :class:`ConfigError` naming the first violated invariant."""
        positive = ("lambda_b", "R_L", "r_c", "P_b", "sigma2", "C", "L", "B_w")
        for name in positive:
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be positive and finite, got {value}")
        for name in ("m_t", "m_c"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value}")
        for name in ("alpha_c", "alpha_t"):
            if not getattr(self, name) > 2.0:
                raise ConfigError(f"{name} must exceed 2 for finite mean interference")
        for name in ("gamma_sic_th", "gamma_t_th", "gamma_c_th"):
            if not getattr(self, name) >= 0.0:
                raise ConfigError(f"{name} must be nonnegative")
        if abs(self.a_c + self.a_t - 1.0) > 1e-9:
            raise ConfigError(f"a_c + a_t = 1 violated ({self.a_c} + {self.a_t})")
        if not (self.a_t > 0 and self.a_c > self.a_t):
            raise ConfigError(f"a_c > a_t > 0 violated (a_c={self.a_c}, a_t={self.a_t})")
        if not self.a_c - self.gamma_sic_th * self.a_t > 0:
            raise ConfigError("a_c - gamma_sic_th * a_t > 0 violated")
        if not self.a_c - self.gamma_c_th * self.a_t > 0:
            raise ConfigError("a_c - gamma_c_th * a_t > 0 violated")
        if not 0.0 <= self.rho_t <= 1.0:
            raise ConfigError(f"rho_t must lie in [0, 1], got {self.rho_t}")
        if not 0.0 < self.rho_a < 1.0:
            raise ConfigError(f"rho_a must lie in (0, 1), got {self.rho_a}")

    @property
    def R_t(self):
        """Typical-user threshold rate in bit/s implied by ``gamma_t_th``."""
        return self.B_w * math.log2(1.0 + self.gamma_t_th)

    @property
    def R_c(self):
        """Connected-user threshold rate in bit/s implied by ``gamma_c_th``."""
        return self.B_w * math.log2(1.0 + self.gamma_c_th)

    @property
    def transmit_snr_db(self):
        return linear_to_db(self.P_b / self.sigma2)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def with_snr_db(self, snr_db):
        """Copy with ``P_b`` set so that ``P_b / sigma2`` equals ``snr_db``."""
        return self.replace(P_b=self.sigma2 * db_to_linear(snr_db))

    @staticmethod
    def threshold_from_rate(rate, bandwidth):
        return 2.0 ** (rate / bandwidth) - 1.0
