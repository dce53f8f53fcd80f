"""Von Mangoldt function, prime-power distances, and the partial sums used by
the predictors.

The sieve is built once (lazily, growing on demand) and then treated as
read-only, so every function here is safe to call from several threads.
"""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass

import numpy as np

from .errors import SieveLimitError, UnsupportedError

DEFAULT_SIEVE_LIMIT = 10**7
INTEGER_TOL = 1e-9


@dataclass(frozen=True)
class LambdaSieve:
    """Table of Λ(n) for 0 <= n <= limit (entry 0 is unused and zero)."""

    limit: int
    values: np.ndarray

    @classmethod
    def build(cls, limit: int) -> "LambdaSieve":
        if limit < 1:
            raise ValueError("sieve limit must be positive")
        is_prime = np.ones(limit + 1, dtype=bool)
        is_prime[:2] = False
        for p in range(2, math.isqrt(limit) + 1):
            if is_prime[p]:
                is_prime[p * p :: p] = False
        primes = np.flatnonzero(is_prime)
        values = np.zeros(limit + 1, dtype=np.float64)
        values[primes] = np.log(primes)
        for p in primes[primes <= math.isqrt(limit)]:
            p = int(p)
            logp = math.log(p)
            q = p * p
            while q <= limit:
                values[q] = logp
                q *= p
        values.setflags(write=False)
        return cls(limit, values)

    def __call__(self, n: int) -> float:
        if n > self.limit:
            raise SieveLimitError(f"Λ({n}) requested but sieve limit is {self.limit}")
        return float(self.values[n])

    def slice(self, lo: int, hi: int) -> np.ndarray:
        """Λ(n) for lo <= n <= hi."""
        if hi > self.limit:
            raise SieveLimitError(f"Λ up to {hi} requested but sieve limit is {self.limit}")
        lo = max(lo, 0)
        return self.values[lo : hi + 1]


_sieve_lock = threading.Lock()
_sieve: LambdaSieve | None = None


def get_sieve(need: int = 2) -> LambdaSieve:
    """Shared sieve covering at least ``need``; rebuilt larger when necessary."""
    global _sieve
    with _sieve_lock:
        if _sieve is None or _sieve.limit < need:
            old = _sieve.limit if _sieve is not None else 0
            _sieve = LambdaSieve.build(max(need, 2 * old, 1 << 16))
        return _sieve


def configure_sieve(limit: int = DEFAULT_SIEVE_LIMIT) -> LambdaSieve:
    """Eagerly build the shared sieve to ``limit``."""
    global _sieve
    with _sieve_lock:
        _sieve = LambdaSieve.build(limit)
        return _sieve


def _prime_power_base(n: int) -> int:
    """Return p if n = p**k for a prime p, else 0."""
    if n < 2:
        return 0
    if n % 2 == 0:
        while n % 2 == 0:
            n //= 2
        return 2 if n == 1 else 0
    f = 3
    while f * f <= n:
        if n % f == 0:
            while n % f == 0:
                n //= f
            return f if n == 1 else 0
        f += 2
    return n


def von_mangoldt(n: int) -> float:
    if n < 1:
        raise ValueError("von_mangoldt needs n >= 1")
    if _sieve is not None and n <= _sieve.limit:
        return float(_sieve.values[n])
    p = _prime_power_base(n)
    return math.log(p) if p else 0.0


def is_prime_power(n: int) -> bool:
    return _prime_power_base(n) != 0


def near_integer(x: float, tol: float = INTEGER_TOL) -> int | None:
    """The integer within ``tol`` of x, if any."""
    k = round(x)
    return int(k) if abs(x - k) <= tol else None


def lambda_real(x: float) -> float:
    """Λ extended to reals: zero unless x is (numerically) an integer prime power."""
    k = near_integer(x)
    if k is None or k < 1:
        return 0.0
    return von_mangoldt(k)


def nearest_prime_power_distance(x: float) -> float:
    """⟨x⟩: distance from x to the closest prime power other than x itself."""
    if not x > 1:
        raise ValueError("need X > 1")
    own = near_integer(x)
    best = math.inf
    lo = math.floor(x)
    while lo >= 2:
        if lo != own and is_prime_power(lo):
            best = x - lo
            break
        lo -= 1
    hi = math.ceil(x)
    while hi - x < best:
        if hi != own and is_prime_power(hi):
            best = min(best, hi - x)
            break
        hi += 1
    return best


class PartialSumKind(enum.Enum):
    RecipSum = "recip"
    LogOverN = "log-over-n"
    LambdaLogOverN = "lambda-log-over-n"
    PowLog = "pow-log"
    PowLambdaLog = "pow-lambda-log"
    LambdaLogNuOverN = "lambda-lognu-over-n"
    PowLambdaLogNu = "pow-lambda-lognu"
    LogNuOverN = "lognu-over-n"
    PowLogNu = "pow-lognu"


_USES_LAMBDA = {
    PartialSumKind.LambdaLogOverN,
    PartialSumKind.PowLambdaLog,
    PartialSumKind.LambdaLogNuOverN,
    PartialSumKind.PowLambdaLogNu,
}


def _summand(kind: PartialSumKind, n: np.ndarray, lam: np.ndarray | None,
             nu: int, C: float) -> np.ndarray:
    nf = n.astype(np.float64)
    logn = np.log(nf)
    K = PartialSumKind
    if kind is K.RecipSum:
        return 1.0 / nf
    if kind is K.LogOverN:
        return logn / nf
    if kind is K.LambdaLogOverN:
        return lam * logn / nf
    if kind is K.PowLog:
        return nf**C * logn
    if kind is K.PowLambdaLog:
        return nf**C * lam * logn
    if kind is K.LambdaLogNuOverN:
        return lam * logn**nu / nf
    if kind is K.PowLambdaLogNu:
        return lam * nf**C * logn**nu
    if kind is K.LogNuOverN:
        return logn**nu / nf
    if kind is K.PowLogNu:
        return nf**C * logn**nu
    raise UnsupportedError(f"unsupported partial-sum kind {kind!r}")


def partial_sum_direct(kind: PartialSumKind, x: float, nu: int = 0, C: float = 0.0,
                       sieve: LambdaSieve | None = None) -> float:
    """Σ_{n<=x} of the kind's summand, correctly rounded via ``math.fsum``."""
    if x < 2:
        raise ValueError("partial sums need x >= 2")
    if C <= -1:
        raise ValueError("need C > -1")
    top = math.floor(x)
    n = np.arange(1, top + 1)
    lam = None
    if kind in _USES_LAMBDA:
        if sieve is None:
            sieve = get_sieve(top)
        lam = sieve.slice(1, top)
    return math.fsum(_summand(kind, n, lam, nu, C))


def _stieltjes_pair() -> tuple[float, float]:
    from .special import stieltjes

    return float(stieltjes(0)), float(stieltjes(1))


def partial_sum_predicted(kind: PartialSumKind, x: float, nu: int = 0,
                          C: float = 0.0) -> tuple[float, float]:
    """Main term and unit-constant error shape for Σ_{n<=x}.

    Returns ``(main, budget)``.
    """
    if not isinstance(kind, PartialSumKind):
        raise UnsupportedError(f"unsupported partial-sum kind {kind!r}")
    L = math.log(x)
    K = PartialSumKind
    g0, g1 = _stieltjes_pair()
    if kind is K.RecipSum:
        return L + g0, 1.0 / x
    if kind is K.LogOverN:
        return 0.5 * L * L + g1, L / x
    if kind is K.LambdaLogOverN:
        return 0.5 * L * L - (g0 * g0 + 2 * g1), math.exp(-math.sqrt(L))
    c1 = C + 1.0
    xc1 = x**c1
    if kind is K.PowLog:
        return xc1 * L / c1 - xc1 / c1**2, x**C * L
    if kind is K.PowLambdaLog:
        return xc1 * L / c1 - xc1 / c1**2, xc1 * math.exp(-math.sqrt(L))
    if kind in (K.LambdaLogNuOverN, K.LogNuOverN):
        return L ** (nu + 1) / (nu + 1), L**nu
    # PowLambdaLogNu, PowLogNu
    return xc1 * L**nu / c1, xc1 * L ** (nu - 1)


def binomial_alpha_identity(nu: int, alpha: float) -> tuple[float, float]:
    """Both sides of Σ_j (-1)^j C(ν,j)(1-α)^{j+1}/(j+1) = (1-α^{ν+1})/(ν+1)."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    b = 1.0 - alpha
    lhs = math.fsum((-1) ** j * math.comb(nu, j) * b ** (j + 1) / (j + 1) for j in range(nu + 1))
    rhs = (1.0 - alpha ** (nu + 1)) / (nu + 1)
    return lhs, rhs

