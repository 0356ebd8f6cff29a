"""Star-function certificates for lower bounds on the double-root value y(beta).

A certificate (beta, k, eta, t) names the power series

    g(t) = 1 - beta * (t + ... + t^(k-1)) + eta * t^k + beta * (t^(k+1) + ...),

the extremal member of the coefficient class with |g_n| <= beta and one free
middle coefficient.  If g(t) > 0 and g'(t) < 0 then no series in the class
can have a double root at or below t, so y(beta) > t.  Both conditions are
checked with a strictness margin to rule out sign flips from rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

#: Validity requires g > SIGN_MARGIN and g' < -SIGN_MARGIN.
SIGN_MARGIN = 1e-9


@dataclass(frozen=True)
class StarCertificate:
    beta: float
    k: int
    eta: float
    t: float

    def __post_init__(self):
        if self.beta < 1.0:
            raise ValueError(f"beta must be >= 1, got {self.beta!r}")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be an integer >= 1, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))
        if not (0.0 < self.t < 1.0):
            raise ValueError(f"t must lie in (0, 1), got {self.t!r}")


@dataclass(frozen=True)
class CertificateReport:
    g_value: float
    g_prime_value: float
    valid: bool
    margin: float
    note: str = ""


def g_star(cert: StarCertificate) -> float:
    """Closed form of the certificate series at t."""
    beta, k, eta, t = cert.beta, cert.k, cert.eta, cert.t
    one_minus = 1.0 - t
    head = t * (1.0 - t ** (k - 1)) / one_minus
    tail = t ** (k + 1) / one_minus
    return 1.0 - beta * head + eta * t ** k + beta * tail


def g_star_prime(cert: StarCertificate) -> float:
    """Exact derivative of the closed form at t."""
    beta, k, eta, t = cert.beta, cert.k, cert.eta, cert.t
    one_minus_sq = (1.0 - t) ** 2
    head = (1.0 - k * t ** (k - 1) + (k - 1) * t ** k) / one_minus_sq
    tail = ((k + 1) * t ** k - k * t ** (k + 1)) / one_minus_sq
    return -beta * head + eta * k * t ** (k - 1) + beta * tail


def verify_certificate(cert: StarCertificate) -> CertificateReport:
    """Check g > 0 and g' < 0 with margin; a valid report licenses y(beta) > t."""
    g = g_star(cert)
    gp = g_star_prime(cert)
    margin = min(g, -gp)
    valid = margin > SIGN_MARGIN
    note = "borderline" if 0.0 < margin <= SIGN_MARGIN else ""
    return CertificateReport(g, gp, valid, margin, note)


def licenses_lower_bound(cert: StarCertificate, t: float) -> bool:
    """Whether a verified certificate implies y(beta) > t.

    A certificate at t0 bounds y(beta) above t0, hence above any t <= t0;
    no re-validation at the smaller t is needed.
    """
    return t <= cert.t and verify_certificate(cert).valid


def search_certificate(
    beta: float,
    t_target: float,
    k_max: int = 6,
    eta_grid: int = 4001,
    t_step: float = 1e-4,
) -> Optional[StarCertificate]:
    """Grid search for a valid certificate with t >= t_target.

    Scans k in 1..k_max, eta over eta_grid uniform points in [-2 beta, 2 beta]
    and t over [t_target, 1) with step t_step, returning the first hit in
    lexicographic (k, eta index, t index) order.  Returns None when the grid
    holds no certificate, which is a normal outcome (for beta in the
    closed-form regime no t above 1/(1+sqrt(beta)) can ever verify).
    """
    if beta < 1.0:
        raise ValueError(f"beta must be >= 1, got {beta!r}")
    if not (0.0 < t_target < 1.0):
        raise ValueError(f"t_target must lie in (0, 1), got {t_target!r}")
    ts = np.arange(t_target, 1.0, t_step)
    ts = ts[ts < 1.0]
    if ts.size == 0:
        return None
    etas = np.linspace(-2.0 * beta, 2.0 * beta, eta_grid)
    one_minus = 1.0 - ts
    # pre-filter on the grid with a doubled margin, then confirm exactly
    grid_margin = 2.0 * SIGN_MARGIN
    for k in range(1, k_max + 1):
        tk = ts ** k
        head = ts * (1.0 - ts ** (k - 1)) / one_minus
        tail = ts ** (k + 1) / one_minus
        base = 1.0 - beta * head + beta * tail
        head_p = (1.0 - k * ts ** (k - 1) + (k - 1) * tk) / one_minus ** 2
        tail_p = ((k + 1) * tk - k * ts ** (k + 1)) / one_minus ** 2
        base_p = -beta * head_p + beta * tail_p
        tk1 = k * ts ** (k - 1)
        eta_lo = (grid_margin - base) / tk
        eta_hi = (-grid_margin - base_p) / tk1
        hit = (etas[:, None] > eta_lo[None, :]) & (etas[:, None] < eta_hi[None, :])
        rows = hit.any(axis=1)
        for e in np.flatnonzero(rows):
            for j in np.flatnonzero(hit[e]):
                cand = StarCertificate(beta, k, float(etas[e]), float(ts[j]))
                if verify_certificate(cand).valid:
                    return cand
    return None
