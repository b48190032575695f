"""Network parameters and transmission-scheme definitions.

All quantities are in linear units: densities per m^2, distances in meters,
powers in linear scale (not dB).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum


@dataclass(frozen=True)
class NetworkParams:
    """Scalar model parameters of the ad hoc network.

    lam      interferer density per m^2
    alpha    pathloss exponent (> 2, else aggregate interference diverges)
    D        transmitter-receiver link distance in meters
    rho      per-stream transmit power
    eta      background noise power
    beta     target SINR (linear)
    epsilon  outage constraint in (0, 1)
    M        transmit antennas
    N        receive antennas
    K        simultaneously served receivers (1 <= K <= M)
    """

    lam: float = 1e-4
    alpha: float = 4.0
    D: float = 10.0
    rho: float = 1.0
    eta: float = 0.0
    beta: float = 3.0
    epsilon: float = 0.1
    M: int = 1
    N: int = 1
    K: int = 1

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        if self.alpha <= 2:
            raise ValueError(f"alpha must be > 2, got {self.alpha}")
        if self.D <= 0:
            raise ValueError(f"D must be > 0, got {self.D}")
        if self.rho <= 0:
            raise ValueError(f"rho must be > 0, got {self.rho}")
        if self.eta < 0:
            raise ValueError(f"eta must be >= 0, got {self.eta}")
        if self.beta <= 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if self.M < 1 or self.N < 1 or self.K < 1:
            raise ValueError("M, N, K must be positive integers")
        if self.K > self.M:
            raise ValueError(f"K={self.K} exceeds transmit antennas M={self.M}")

    @property
    def eta_over_rho(self) -> float:
        return self.eta / self.rho

    @property
    def zeta(self) -> float:
        """SINR threshold scaled by pathloss at the link distance."""
        return self.beta * self.D**self.alpha

    def replace(self, **changes) -> "NetworkParams":
        return dataclasses.replace(self, **changes)


class Scheme(Enum):
    """Transmission/reception strategies with their distributional laws.

    Each scheme fixes two laws used by both the analytic formulas and the
    simulator: the signal-gain law of the typical link (Gamma shape, or max
    of N unit exponentials for antenna selection) and the shape of the
    Gamma-distributed interference mark attached to each Poisson interferer.
    """

    DPC_MIMO_UB = "dpc-mimo-ub"
    DPC_MISO = "dpc-miso"
    ZF_MULTI = "zf-multi"
    ZF_RXZF = "zf-rxzf"
    ZF_ANTSEL = "zf-antsel"
    ZF_MISO = "zf-miso"
    BD_UB = "bd-ub"
    SISO_BASELINE = "siso"

    @classmethod
    def from_name(cls, name: str) -> "Scheme":
        for s in cls:
            if s.value == name:
                return s
        valid = ", ".join(s.value for s in cls)
        raise ValueError(f"unknown scheme {name!r}; valid schemes: {valid}")

    def check_feasible(self, p: NetworkParams) -> None:
        """Raise ValueError if the antenna configuration is infeasible."""
        if self is Scheme.SISO_BASELINE:
            if not (p.M == 1 and p.N == 1 and p.K == 1):
                raise ValueError("siso baseline requires M = N = K = 1")
        elif self in (Scheme.DPC_MISO, Scheme.ZF_MISO):
            if p.N != 1:
                raise ValueError(f"{self.value} requires N = 1, got N={p.N}")
            if p.K != p.M:
                raise ValueError(f"{self.value} serves K = M receivers, got K={p.K}, M={p.M}")
        elif self is Scheme.ZF_ANTSEL:
            if p.K != p.M:
                raise ValueError(f"zf-antsel serves K = M receivers, got K={p.K}, M={p.M}")
        elif self in (Scheme.ZF_MULTI, Scheme.BD_UB):
            if p.M < p.K * p.N:
                raise ValueError(
                    f"{self.value} requires M >= K*N, got M={p.M}, K={p.K}, N={p.N}"
                )
        elif self is Scheme.ZF_RXZF:
            if p.N <= p.M:
                raise ValueError(f"zf-rxzf requires N > M, got M={p.M}, N={p.N}")
        elif self is Scheme.DPC_MIMO_UB:
            if p.K != p.M:
                raise ValueError(f"dpc-mimo-ub serves K = M receivers, got K={p.K}, M={p.M}")

    def signal_dof(self, p: NetworkParams) -> int:
        """Shape of the Gamma(d, 1) signal-gain law.

        For ZF_ANTSEL the signal is the max of N unit exponentials, not a
        Gamma variate; this returns N there (callers that need the order
        statistic must branch on ``is_order_statistic``).
        """
        if self is Scheme.DPC_MIMO_UB:
            return p.M * p.N
        if self is Scheme.DPC_MISO:
            return p.M
        if self is Scheme.ZF_MULTI:
            return p.M - p.K * p.N + 1
        if self is Scheme.ZF_RXZF:
            return p.N - p.M + 1
        if self in (Scheme.ZF_MISO, Scheme.SISO_BASELINE):
            return 1
        if self is Scheme.BD_UB:
            return p.N * p.M - (p.K - 1) * p.N**2
        if self is Scheme.ZF_ANTSEL:
            return p.N
        raise AssertionError(self)

    @property
    def is_order_statistic(self) -> bool:
        return self is Scheme.ZF_ANTSEL

    def mark_shape(self, p: NetworkParams) -> int:
        """Shape of the Gamma(m, 1) interference-mark law."""
        if self is Scheme.ZF_MULTI:
            return p.K * p.N
        if self is Scheme.BD_UB:
            return p.K
        if self is Scheme.SISO_BASELINE:
            return 1
        # DPC variants, antenna selection, ZF MISO, receive-ZF: M streams
        return p.M

    def default_config(self, antennas: int) -> tuple[int, int, int]:
        """(M, N, K) for an antenna-sweep point (matched-antenna conventions)."""
        a = antennas
        if self in (Scheme.DPC_MIMO_UB, Scheme.ZF_ANTSEL):
            return a, a, a
        if self in (Scheme.DPC_MISO, Scheme.ZF_MISO):
            return a, 1, a
        if self is Scheme.ZF_MULTI:
            # fully loaded M = KN: the user count grows, two antennas each
            return 2 * a, 2, a
        if self is Scheme.BD_UB:
            # two served users at full load M = KN; sweep is over N
            return 2 * a, a, 2
        if self is Scheme.ZF_RXZF:
            return a, 2 * a, 1
        if self is Scheme.SISO_BASELINE:
            return 1, 1, 1
        raise AssertionError(self)
