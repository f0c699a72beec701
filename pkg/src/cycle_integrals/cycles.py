"""Zero-cycles: symmetry groups, genericity certificates, and the closed-form
bound and infinity-count formulas.

A cycle is an integer weight vector (n_1, ..., n_m) with zero sum attached
to the m points of a fiber.  Its signed symmetry group is the quotient
factor between oracle roots and distinct zeros of the integral, and the
regularity-at-infinity certificate decides whether the Bezout count is
attained without losses on the hyperplane at infinity.
"""

import cmath
import itertools
import math
import random
from dataclasses import dataclass

from .config import DEFAULT
from .errors import (DomainError, FiberTooLarge, GenericCycleNotFound,
                     InvalidCycle, NonIntegerBound)


@dataclass(frozen=True)
class Cycle:
    """Integer weights (n_1, ..., n_m) with sum zero, not all zero."""

    weights: tuple

    def __init__(self, weights):
        weights = tuple(int(w) for w in weights)
        if sum(weights) != 0:
            raise InvalidCycle(f"weights must sum to zero, got {weights}")
        if not any(weights):
            raise InvalidCycle("all-zero weight vector is not a cycle")
        object.__setattr__(self, "weights", weights)

    @property
    def m(self):
        return len(self.weights)

    @property
    def is_simple(self):
        nonzero = sorted(w for w in self.weights if w)
        return nonzero == [-1, 1]

    def padded(self, length):
        """Weights extended by zeros for deformed fibers with extra roots."""
        if length < self.m:
            raise InvalidCycle("cannot pad to a shorter length")
        return self.weights + (0,) * (length - self.m)


@dataclass(frozen=True)
class SymmetryGroup:
    """Signed permutations h with (w[h(1)], ..., w[h(m)]) = sign * w."""

    elements: tuple  # of (permutation tuple, sign)
    order: int


@dataclass(frozen=True)
class GenericityCertificate:
    is_simple: bool
    is_asymmetric: bool
    regular_at_infinity: bool
    failing_permutations: tuple  # 1-based Stab_m permutations violating the test
    n_tested: int

    def as_dict(self):
        return {
            "is_simple": self.is_simple,
            "is_asymmetric": self.is_asymmetric,
            "regular_at_infinity": self.regular_at_infinity,
            "failing_permutations": [list(p) for p in self.failing_permutations],
            "n_tested": self.n_tested,
        }


def _check_fiber_cap(m, settings):
    if m > settings.fiber_cap:
        raise FiberTooLarge(f"fiber size {m} exceeds cap {settings.fiber_cap}")


def symmetry_group(cycle, settings=DEFAULT):
    """Exhaustive enumeration of the signed symmetry group of the weights."""
    w = cycle.weights
    m = len(w)
    _check_fiber_cap(m, settings)
    neg = tuple(-v for v in w)
    elements = []
    for perm in itertools.permutations(range(m)):
        permuted = tuple(w[perm[j]] for j in range(m))
        if permuted == w:
            elements.append((perm, 1))
        elif permuted == neg:
            elements.append((perm, -1))
    return SymmetryGroup(elements=tuple(elements), order=len(elements))


def is_asymmetric(cycle, settings=DEFAULT):
    return symmetry_group(cycle, settings).order == 1


def regular_at_infinity(cycle, n, settings=DEFAULT):
    """Certificate that no intersection points fall on the hyperplane at
    infinity for a deformation of degree n.

    Evaluates sum_j n_j xi^(n*alpha_j), xi = exp(2 pi i/m), over the
    (m-1)! permutations alpha fixing the last index.  When m divides n
    every sum collapses to sum n_j = 0 and the test cannot pass.
    """
    if n < 1:
        raise DomainError("deformation degree must be >= 1")
    w = cycle.weights
    m = len(w)
    _check_fiber_cap(m, settings)
    simple = cycle.is_simple
    asym = is_asymmetric(cycle, settings)

    if n % m == 0:
        failing = tuple(perm + (m,) for perm in itertools.permutations(range(1, m)))
        return GenericityCertificate(simple, asym, False, failing, n)

    xi_pow = [cmath.exp(2j * cmath.pi * ((n * a) % m) / m) for a in range(m)]
    weight_scale = sum(abs(v) for v in w)
    failing = []
    for perm in itertools.permutations(range(1, m)):
        alpha = perm + (m,)
        total = sum(w[j] * xi_pow[alpha[j] % m] for j in range(m))
        if abs(total) < settings.infinity_zero_tol * weight_scale:
            failing.append(alpha)
    return GenericityCertificate(simple, asym, not failing, tuple(failing), n)


def infinity_point_count(m, n, settings=DEFAULT):
    """Unavoidable points at infinity of the deformed connection curve."""
    if m < 2:
        raise DomainError("fiber size must be >= 2")
    if n < m:
        raise DomainError("infinity count requires n >= m")
    if n % m != 0:
        return 0
    if m == 2:
        return math.factorial(n - 2)
    return math.factorial(m - 1) * math.factorial(n - m)


def bound_tangential(m, n):
    """Sharp zero count for the first-order problem at degrees (m, n)."""
    if m < 2 or n < 1:
        raise DomainError("need m >= 2 and n >= 1")
    if m == 2:
        return (n - 1) // 2
    if n % m == 0:
        return (n - 1) * math.factorial(m - 1)
    return n * math.factorial(m - 1)


def bound_infinitesimal(m, n):
    """Sharp zero count for the full displacement problem at degrees (m, n)."""
    if m < 2 or n < 1:
        raise DomainError("need m >= 2 and n >= 1")
    if m == 2:
        return (n - 1) // 2
    if n < m:
        return n * math.factorial(m - 1)
    base = m * math.factorial(n - 1) // math.factorial(n - m)
    if n % m == 0:
        base -= math.factorial(m - 1)
    return base


def bound_simple(m, n):
    """Sharp zero count on simple cycles: ((n-1)(m-1) - (d-1))/2, d = gcd."""
    if m < 2 or n < 1:
        raise DomainError("need m >= 2 and n >= 1")
    d = math.gcd(m, n)
    num = (n - 1) * (m - 1) - (d - 1)
    if num % 2 != 0:
        raise NonIntegerBound(f"simple-cycle bound not integral at ({m}, {n})")
    return num // 2


def random_generic_cycle(m, n, rng_seed, settings=DEFAULT):
    """Rejection-sample an asymmetric cycle regular at infinity for degree n.

    Deterministic for a given seed.  For m = 2 every cycle is simple and
    symmetric, so the retry cap is always exhausted.
    """
    if m < 2:
        raise DomainError("fiber size must be >= 2")
    _check_fiber_cap(m, settings)
    rng = random.Random(rng_seed)
    bound = settings.weight_bound
    for _ in range(settings.cycle_retry_cap):
        head = [rng.randint(-bound, bound) for _ in range(m - 1)]
        tail = -sum(head)
        if abs(tail) > bound:
            continue
        weights = tuple(head) + (tail,)
        if not any(weights):
            continue
        cycle = Cycle(weights)
        if not is_asymmetric(cycle, settings):
            continue
        if not regular_at_infinity(cycle, n, settings).regular_at_infinity:
            continue
        return cycle
    raise GenericCycleNotFound(
        f"no asymmetric cycle regular at infinity found for m={m}, n={n}")


def random_simple_cycle(m, rng_seed):
    """A random simple cycle z_i - z_j on an m-point fiber (deterministic)."""
    if m < 2:
        raise DomainError("fiber size must be >= 2")
    rng = random.Random(rng_seed)
    i, j = rng.sample(range(m), 2)
    weights = [0] * m
    weights[i] = 1
    weights[j] = -1
    return Cycle(weights)
