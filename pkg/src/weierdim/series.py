"""Lacunary series evaluation with rigorous truncation tails.

Evaluates the graph series f(x) = sum_n lam^n phi(b^n x + theta_n), the
stable-direction slope series

    Y(x) = 2 pi sum_{n>=1} gamma^n sin(2 pi (x/b^n + i_1/b^n + ... + i_n/b)),

its x- and gamma-derivatives, and the skew-product fiber sum

    S(x) = sum_{n>=1} gamma^{n-1} psi(x/b^n + i_1/b^n + ... + i_n/b),

where gamma = 1/(b*lam) and (i_1, i_2, ...) is a digit word over
{0, .., b-1}.  Every result carries an absolute bound on the omitted
remainder, derived from the closed-form geometric tail, so truncation depth
is always chosen from the requested tolerance rather than a fixed count.

The slope arguments follow the contracting recurrence u_n = (u_{n-1}+i_n)/b,
which is numerically stable.  The graph series arguments b^n x are reduced
mod 1 in exact integer arithmetic (x is a dyadic rational), so deep terms do
not lose the fractional part to floating-point cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import rng

TWO_PI = 2.0 * math.pi
_MAX_TERMS = 10_000_000


@dataclass(frozen=True)
class Params:
    """Base/scale pair (b, lam) for one graph, with derived quantities.

    Requires integer b >= 2 and 1/b < lam < 1.  The contraction ratio of the
    stable direction is gamma = 1/(b*lam) and the self-affinity exponent is
    2 + log(lam)/log(b).
    """

    b: int
    lam: float

    def __post_init__(self):
        if int(self.b) != self.b or self.b < 2:
            raise ValueError(f"base must be an integer >= 2, got {self.b!r}")
        object.__setattr__(self, "b", int(self.b))
        if not (1.0 / self.b < self.lam < 1.0):
            raise ValueError(
                f"lam must lie in (1/{self.b}, 1), got {self.lam!r}"
            )

    @property
    def gamma(self) -> float:
        return 1.0 / (self.b * self.lam)

    @property
    def affinity_dim(self) -> float:
        return 2.0 + math.log(self.lam) / math.log(self.b)


@dataclass(frozen=True)
class PhiSpec:
    """Z-periodic trigonometric polynomial.

    phi(x) = constant + sum a_k cos(2 pi k x) + sum c_k sin(2 pi k x), with
    integer frequencies k >= 1.  Derivatives and sup-norm bounds are exact,
    which is what makes the series tail bounds closed-form.
    """

    cosine_coeffs: tuple[tuple[int, float], ...] = ()
    sine_coeffs: tuple[tuple[int, float], ...] = ()
    constant: float = 0.0

    def __post_init__(self):
        for k, _ in (*self.cosine_coeffs, *self.sine_coeffs):
            if int(k) != k or k < 1:
                raise ValueError(f"frequencies must be integers >= 1, got {k!r}")

    def oscillating(self, x):
        """Trigonometric part only (no constant); accepts scalars or arrays."""
        total = x * 0.0
        for k, a in self.cosine_coeffs:
            total = total + a * np.cos(TWO_PI * k * x)
        for k, a in self.sine_coeffs:
            total = total + a * np.sin(TWO_PI * k * x)
        return total

    def eval(self, x):
        return self.oscillating(x) + self.constant

    def derivative(self) -> "PhiSpec":
        cos = tuple((k, TWO_PI * k * a) for k, a in self.sine_coeffs)
        sin = tuple((k, -TWO_PI * k * a) for k, a in self.cosine_coeffs)
        return PhiSpec(cosine_coeffs=cos, sine_coeffs=sin, constant=0.0)

    def oscillating_sup(self) -> float:
        return sum(abs(a) for _, a in self.cosine_coeffs) + sum(
            abs(a) for _, a in self.sine_coeffs
        )

    def sup_bound(self) -> float:
        """Upper bound for sup |phi| (exact for a single term)."""
        return abs(self.constant) + self.oscillating_sup()


#: The classical choice phi(x) = cos(2 pi x).
COSINE = PhiSpec(cosine_coeffs=((1, 1.0),))

#: Its derivative, psi(x) = -2 pi sin(2 pi x), the default fiber function.
COSINE_DERIV = COSINE.derivative()


@dataclass(frozen=True)
class DigitWord:
    """Infinite digit word: an explicit finite prefix plus a tail policy.

    tail_seed None reproduces the all-zero tail (0, 0, ...); an integer seed
    selects a reproducible counter-based random tail.  tail_offset shifts the
    tail indexing and exists so that shifted() stays exact for random tails.
    """

    digits: tuple[int, ...] = ()
    tail_seed: Optional[int] = None
    tail_offset: int = 0

    def __post_init__(self):
        for d in self.digits:
            if int(d) != d or d < 0:
                raise ValueError(f"digits must be nonnegative integers, got {d!r}")
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))

    def validate_base(self, b: int) -> None:
        if self.digits and max(self.digits) >= b:
            raise ValueError(f"word {self.digits} has digits >= base {b}")

    def digit_array(self, count: int, b: int) -> np.ndarray:
        """First `count` digits (1-based positions 1..count) for base b."""
        self.validate_base(b)
        head = np.asarray(self.digits[:count], dtype=np.int64)
        n_tail = count - len(head)
        if n_tail <= 0:
            return head
        if self.tail_seed is None:
            tail = np.zeros(n_tail, dtype=np.int64)
        else:
            tail = rng.digit_vector(
                self.tail_seed, rng.STREAM_WORD_TAIL,
                self.tail_offset + 1, n_tail, b,
            )
        return np.concatenate([head, tail])

    def shifted(self, k: int = 1) -> "DigitWord":
        """Drop the first k digits (the left shift sigma^k)."""
        if k < 0:
            raise ValueError("shift must be nonnegative")
        if k <= len(self.digits):
            return DigitWord(self.digits[k:], self.tail_seed, self.tail_offset)
        return DigitWord((), self.tail_seed, self.tail_offset + k - len(self.digits))


@dataclass(frozen=True)
class SeriesValue:
    """A numeric value with an absolute bound on the omitted series tail."""

    value: float
    tail_bound: float
    terms_used: int

    def __post_init__(self):
        if self.tail_bound < 0:
            raise ValueError("tail_bound must be nonnegative")


def eval_phi(phi: PhiSpec, x: float) -> float:
    """Exact finite trigonometric sum phi(x)."""
    return float(phi.eval(x))


def eval_phi_prime(phi: PhiSpec, x: float) -> float:
    """Term-wise derivative phi'(x)."""
    return float(phi.derivative().eval(x))


def _require_tol(abs_tol: float) -> None:
    if not (abs_tol > 0.0):
        raise ValueError(f"abs_tol must be positive, got {abs_tol!r}")


def _geom_terms(abs_tol: float, ratio: float, coef: float, shift: int) -> int:
    """Minimal n >= 0 with coef * ratio^(n+shift) / (1-ratio) <= abs_tol."""
    if coef == 0.0:
        return 0
    target = abs_tol * (1.0 - ratio) / coef
    if target >= ratio ** shift:
        return 0
    n = max(0, math.ceil(math.log(target) / math.log(ratio)) - shift)
    while coef * ratio ** (n + shift) / (1.0 - ratio) > abs_tol:
        n += 1
        if n > _MAX_TERMS:
            raise ValueError("tolerance requires an unreasonable number of terms")
    return n


def tail_bound_slope(gamma: float, n: int) -> float:
    """Tail of 2 pi sum_{k>n} gamma^k."""
    return TWO_PI * gamma ** (n + 1) / (1.0 - gamma)


def tail_bound_slope_dx(b: int, gamma: float, n: int) -> float:
    """Tail of 4 pi^2 sum_{k>n} (gamma/b)^k."""
    r = gamma / b
    return 4.0 * math.pi ** 2 * r ** (n + 1) / (1.0 - r)


def tail_bound_slope_dgamma(gamma: float, n: int) -> float:
    """Tail of 2 pi sum_{k>n} k gamma^(k-1), summed in closed form."""
    return TWO_PI * gamma ** n * ((n + 1) - n * gamma) / (1.0 - gamma) ** 2


def _slope_terms(abs_tol: float, gamma: float) -> int:
    return max(1, _geom_terms(abs_tol, gamma, TWO_PI, 1))


def _slope_dx_terms(abs_tol: float, b: int, gamma: float) -> int:
    return max(1, _geom_terms(abs_tol, gamma / b, 4.0 * math.pi ** 2, 1))


def _slope_dgamma_terms(abs_tol: float, gamma: float) -> int:
    n = max(1, _geom_terms(abs_tol, gamma, TWO_PI, 1))
    while tail_bound_slope_dgamma(gamma, n) > abs_tol:
        n += 1
        if n > _MAX_TERMS:
            raise ValueError("tolerance requires an unreasonable number of terms")
    return n


def _fiber_terms(abs_tol: float, gamma: float, sup: float) -> int:
    return max(1, _geom_terms(abs_tol, gamma, sup, 0))


def _frac_mod1(x: float) -> tuple[int, int]:
    """Exact fractional part of x as (numerator, power-of-two denominator)."""
    f = Fraction(x) % 1
    return f.numerator, f.denominator


def _series_scale(p) -> tuple[int, float]:
    # The graph series converges for any lam in (0, 1); a plain (b, lam) pair
    # covers boundary scales that the Params invariant excludes.
    if isinstance(p, Params):
        return p.b, p.lam
    b, lam = p
    if int(b) != b or b < 2:
        raise ValueError(f"base must be an integer >= 2, got {b!r}")
    if not (0.0 < lam < 1.0):
        raise ValueError(f"lam must lie in (0, 1), got {lam!r}")
    return int(b), float(lam)


def eval_weierstrass(
    p,
    phi: PhiSpec,
    x: float,
    phases: Optional[Sequence[float]] = None,
    abs_tol: float = 1e-9,
    terms: Optional[int] = None,
) -> SeriesValue:
    """Evaluate f(x) = sum_{n>=0} lam^n phi(b^n x + theta_n).

    Parameters
    ----------
    p : Params, or a plain (b, lam) pair with any lam in (0, 1).
    phases : optional per-term offsets theta_n; terms beyond the list use 0.
    abs_tol : requested bound on the omitted tail; the number of terms is the
        minimal N with sup|phi| * lam^N / (1 - lam) <= abs_tol.
    terms : explicit term count overriding the tolerance-driven choice.

    The argument b^n x is reduced mod 1 exactly (integer arithmetic on the
    dyadic representation of x), so every summed term is accurate to rounding.
    """
    b, lam = _series_scale(p)
    sup = phi.sup_bound()
    if terms is None:
        _require_tol(abs_tol)
        n_terms = _geom_terms(abs_tol, lam, sup, 0)
    else:
        n_terms = int(terms)
    num, den = _frac_mod1(x)
    acc = 0.0
    lam_pow = 1.0
    for n in range(n_terms):
        t = num / den
        if phases is not None and n < len(phases):
            t = (t + phases[n]) % 1.0
        acc += lam_pow * float(phi.eval(t))
        lam_pow *= lam
        num = (num * b) % den
    tail = sup * lam_pow / (1.0 - lam)
    return SeriesValue(float(acc), float(tail), n_terms)


def _orbit(word: DigitWord, x: float, b: int, n_terms: int) -> np.ndarray:
    """Backward-orbit arguments u_n = (u_{n-1} + i_n)/b for n = 1..n_terms."""
    digs = word.digit_array(n_terms, b)
    out = np.empty(n_terms, dtype=np.float64)
    u = x
    for n in range(n_terms):
        u = (u + digs[n]) / b
        out[n] = u
    return out


def eval_stable_slope(
    p: Params,
    word: DigitWord,
    x: float,
    abs_tol: float = 1e-9,
    terms: Optional[int] = None,
) -> SeriesValue:
    """Slope of the strong-stable direction at (x, word).

    Returns 2 pi sum_{n=1}^{N} gamma^n sin(2 pi u_n) with the geometric tail
    bound 2 pi gamma^(N+1) / (1 - gamma).  The vector (1, value) spans the
    stable line at x for this word.
    """
    gamma = p.gamma
    if terms is None:
        _require_tol(abs_tol)
        n_terms = _slope_terms(abs_tol, gamma)
    else:
        n_terms = int(terms)
    u = _orbit(word, x, p.b, n_terms)
    powers = gamma ** np.arange(1, n_terms + 1)
    value = TWO_PI * float(np.dot(powers, np.sin(TWO_PI * u)))
    return SeriesValue(value, tail_bound_slope(gamma, n_terms), n_terms)


def eval_stable_slope_dx(
    p: Params,
    word: DigitWord,
    x: float,
    abs_tol: float = 1e-9,
    terms: Optional[int] = None,
) -> SeriesValue:
    """x-derivative of the stable slope: 4 pi^2 sum (gamma/b)^n cos(2 pi u_n)."""
    gamma = p.gamma
    if terms is None:
        _require_tol(abs_tol)
        n_terms = _slope_dx_terms(abs_tol, p.b, gamma)
    else:
        n_terms = int(terms)
    u = _orbit(word, x, p.b, n_terms)
    powers = (gamma / p.b) ** np.arange(1, n_terms + 1)
    value = 4.0 * math.pi ** 2 * float(np.dot(powers, np.cos(TWO_PI * u)))
    return SeriesValue(value, tail_bound_slope_dx(p.b, gamma, n_terms), n_terms)


def eval_stable_slope_dgamma(
    p: Params,
    word: DigitWord,
    x: float,
    abs_tol: float = 1e-9,
    terms: Optional[int] = None,
) -> SeriesValue:
    """gamma-derivative of the stable slope: 2 pi sum n gamma^(n-1) sin(2 pi u_n)."""
    gamma = p.gamma
    if terms is None:
        _require_tol(abs_tol)
        n_terms = _slope_dgamma_terms(abs_tol, gamma)
    else:
        n_terms = int(terms)
    u = _orbit(word, x, p.b, n_terms)
    ns = np.arange(1, n_terms + 1)
    powers = ns * gamma ** (ns - 1)
    value = TWO_PI * float(np.dot(powers, np.sin(TWO_PI * u)))
    return SeriesValue(value, tail_bound_slope_dgamma(gamma, n_terms), n_terms)


def eval_fiber_sum(
    p: Params,
    psi: PhiSpec,
    word: DigitWord,
    x: float,
    abs_tol: float = 1e-9,
    terms: Optional[int] = None,
) -> SeriesValue:
    """Fiber sum S(x) = sum_{n>=1} gamma^(n-1) psi(u_n) of the skew product.

    The constant component of psi is summed in closed form (it contributes
    exactly constant/(1-gamma)), so only the oscillating part is truncated.
    With psi equal to the derivative of the graph's phi, the identity
    Y = -gamma * S holds.
    """
    gamma = p.gamma
    sup = psi.oscillating_sup()
    if terms is None:
        _require_tol(abs_tol)
        n_terms = _fiber_terms(abs_tol, gamma, sup)
    else:
        n_terms = int(terms)
    u = _orbit(word, x, p.b, n_terms)
    powers = gamma ** np.arange(n_terms)
    value = float(np.dot(powers, psi.oscillating(u)))
    value += psi.constant / (1.0 - gamma)
    tail = sup * gamma ** n_terms / (1.0 - gamma)
    return SeriesValue(value, tail, n_terms)


def default_depth(gamma: float, tail_target: float = 1e-9) -> int:
    """Truncation depth making the slope-series tail at most tail_target."""
    return _slope_terms(tail_target, gamma)


def slope_grid(
    b: int,
    gamma: float,
    x: np.ndarray,
    digits: np.ndarray,
    want_dgamma: bool = False,
) -> tuple[np.ndarray, np.ndarray, Optional[np.ndarray]]:
    """Vectorized slope series for many words over a grid of x.

    digits has shape (words, depth); x has shape (points,).  Returns arrays of
    shape (words, points): the slope, its x-derivative, and (optionally) its
    gamma-derivative, each truncated at the full depth.
    """
    n_words, depth = digits.shape
    u = np.broadcast_to(x, (n_words, x.size)).astype(np.float64).copy()
    sy = np.zeros_like(u)
    sdx = np.zeros_like(u)
    sdg = np.zeros_like(u) if want_dgamma else None
    gp = 1.0   # gamma^n
    rp = 1.0   # (gamma/b)^n
    gpm = 1.0  # gamma^(n-1)
    for n in range(1, depth + 1):
        u += digits[:, n - 1][:, None]
        u /= b
        gp *= gamma
        rp *= gamma / b
        s = np.sin(TWO_PI * u)
        sy += gp * s
        sdx += rp * np.cos(TWO_PI * u)
        if sdg is not None:
            sdg += (n * gpm) * s
        gpm *= gamma
    y = TWO_PI * sy
    ydx = 4.0 * math.pi ** 2 * sdx
    ydg = TWO_PI * sdg if sdg is not None else None
    return y, ydx, ydg
