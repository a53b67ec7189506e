"""Ancestor-label chains, gamma-tail bounds, the first-parent tail bound,
and the branching-walk estimator of the reciprocal shortest-path constant.

The label of a uniformly drawn parent of a node labeled m is floor(m*U),
so the single-line ancestor labels of node n evolve as nested floors of
uniform products and are sandwiched between n*prod(U) - j and n*prod(U).
Since -ln of a product of j uniforms is gamma(j)-distributed, gamma
tails control how fast labels fall; the log-concavity bounds implemented
here are the sharp elementary ones.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from . import _kernels
from .errors import DomainError, ResourceError

_MAX_EXACT_N = 1 << 53  # beyond this, floor(n*U) is not exact in floats


@dataclass(frozen=True)
class LabelChain:
    """Successive single-line ancestor labels of a node labeled `start`."""

    start: int
    labels: tuple
    uniforms: tuple


def sample_label_chain(n, ell, rng):
    """Chain of `ell` labels from start n; retains the uniforms used."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if n > _MAX_EXACT_N:
        raise DomainError(f"n must be <= 2**53 for exact floors, got {n}")
    if ell < 1:
        raise DomainError(f"ell must be >= 1, got {ell}")
    us = [rng.uniforms() for _ in range(ell)]
    labels = []
    label = n
    for u in us:
        label = int(label * u)  # floor: label*u >= 0
        labels.append(label)
    return LabelChain(start=n, labels=tuple(labels), uniforms=tuple(us))


def verify_label_sandwich(chain):
    """Replay the sandwich n*U1..Uj - j <= labels[j-1] <= n*U1..Uj exactly.

    Uniforms are dyadic rationals, so the products are checked in exact
    arithmetic.  Raises AssertionError on violation; also checks
    monotonicity.
    """
    prod = Fraction(chain.start)
    prev = chain.start
    for j, (label, u) in enumerate(zip(chain.labels, chain.uniforms), start=1):
        prod *= Fraction(u)
        assert label <= prod, f"label {label} above the product bound at step {j}"
        assert label >= prod - j, f"label {label} below product - {j} at step {j}"
        assert label <= prev, f"labels increased at step {j}"
        prev = label


# ---------------------------------------------------------------------------
# Gamma tails: bounds and an independent reference


def _log_gamma_density(a, x):
    return (a - 1.0) * math.log(x) - x - math.lgamma(a)


def gamma_upper_bound(a, x):
    """Upper bound on P{G_a >= x} for a >= 1, x > a-1 (log-concave tail):
    density(x) / (1 - (a-1)/x)."""
    if a < 1:
        raise DomainError(f"shape a must be >= 1, got {a}")
    if x <= a - 1 or x <= 0:
        raise DomainError(f"upper tail bound needs x > a-1 (= {a - 1}), got {x}")
    return math.exp(_log_gamma_density(a, x)) / (1.0 - (a - 1.0) / x)


def gamma_lower_bound(a, x):
    """Upper bound on P{G_a <= x} for a > 1, 0 < x < a-1:
    density(x) / ((a-1)/x - 1)."""
    if a <= 1:
        raise DomainError(f"lower tail bound needs a > 1, got {a}")
    if not 0 < x < a - 1:
        raise DomainError(f"lower tail bound needs 0 < x < a-1 (= {a - 1}), got {x}")
    return math.exp(_log_gamma_density(a, x)) / ((a - 1.0) / x - 1.0)


def regularized_gamma_p(a, x, rtol=1e-12, max_iter=10_000):
    """Lower regularized incomplete gamma P(a, x), implemented from
    scratch as the comparison oracle: series below a+1, Lentz continued
    fraction above."""
    if a <= 0:
        raise DomainError(f"shape a must be > 0, got {a}")
    if x < 0:
        raise DomainError(f"x must be >= 0, got {x}")
    if x == 0:
        return 0.0
    if x < a + 1.0:
        # P(a,x) = x^a e^-x / Gamma(a+1) * sum_k x^k / prod_{m<=k}(a+m)
        term = 1.0 / a
        total = term
        denom = a
        for _ in range(max_iter):
            denom += 1.0
            term *= x / denom
            total += term
            if abs(term) < abs(total) * rtol:
                break
        return total * math.exp(a * math.log(x) - x - math.lgamma(a))
    return 1.0 - _gamma_q_cf(a, x, rtol, max_iter)


def _gamma_q_cf(a, x, rtol, max_iter):
    # modified Lentz for Q(a,x) = e^-x x^a / Gamma(a) * CF
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, max_iter):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < rtol:
            break
    return h * math.exp(a * math.log(x) - x - math.lgamma(a))


def regularized_gamma_q(a, x, rtol=1e-12):
    """Upper regularized incomplete gamma Q(a, x) = P{G_a >= x}."""
    if x < a + 1.0:
        return 1.0 - regularized_gamma_p(a, x, rtol)
    return _gamma_q_cf(a, x, rtol, 10_000)


# ---------------------------------------------------------------------------
# First-parent depth tail


def rn_tail_bound(n, t):
    """exp(t - ln n - t*ln(t / ln n)): bound on P{first-parent depth > t}.

    Valid for t >= ln n (n may be real to allow exact-log evaluation);
    equals the optimized exponential-moment bound inf over tilt of
    n^s (s+1)^-t.
    """
    if n <= 1:
        raise DomainError(f"n must be > 1, got {n}")
    log_n = math.log(n)
    if t < log_n:
        raise DomainError(f"bound needs t >= ln n = {log_n:.6g}, got {t}")
    return math.exp(t - log_n - t * math.log(t / log_n))


# ---------------------------------------------------------------------------
# Branching-walk maximum


@dataclass(frozen=True)
class BrwSample:
    """-ln of the minimal uniform path product over the full k-ary tree of
    depth ell: equivalently the maximal root-leaf sum of unit exponentials."""

    ell: int
    k: int
    value: float


DEFAULT_LEAF_BUDGET = 1 << 24


def sample_brw(ell, k, rng, leaf_budget=DEFAULT_LEAF_BUDGET):
    """Exact maximum over all k**ell root-leaf paths, O(ell) memory.

    Edge weights are addressed by tree position inside `rng`'s stream
    (word v for heap node v), so the sample is a pure function of the
    stream's key: pass a dedicated stream per sample.
    """
    if ell < 1:
        raise DomainError(f"ell must be >= 1, got {ell}")
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if k ** ell > leaf_budget:
        raise ResourceError(
            f"k**ell = {k ** ell} leaves exceeds the traversal budget "
            f"{leaf_budget}; use a smaller ell"
        )
    k0, k1 = rng.origin
    value = _kernels.brw_max_sum(k0, k1, ell, k)
    return BrwSample(ell=ell, k=k, value=value)
