"""Abelian integrals, displacement values, degree reduction, and the
branch-complete product oracles.

The tangential oracle is N(t) = prod over all orderings sigma of the fiber
of sum_j n_j g(z_sigma(j)(t)); the infinitesimal oracle takes the deformed
fiber of f + eps*g and multiplies over injections of the weight slots into
the fiber, which quotients the permutations of the extra zero-weight roots
exactly once.  Both are single-valued polynomials in t recovered by
sampling on a circle enclosing the critical values and reading the
coefficients off a DFT; the declared degree bound comes from the growth of
the branches at infinity.  When double precision cannot separate the
coefficient scales the build escalates through an mpmath precision ladder
and re-verifies every extracted zero against the branches.
"""

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
import numpy as np

from .config import DEFAULT, precision_dps
from .cycles import Cycle, symmetry_group
from .errors import (FitRejected, IdentityViolation, InputError,
                     LengthMismatch, SingularDesignSystem)
from .poly import ComplexPoly, RatPoly, as_fraction, critical_values, roots_raw
from .precision import aberth_mp, dft_fit_mp, horner_mp
from .tracking import solve_fiber


@dataclass(frozen=True)
class Instance:
    """A polynomial pair with a cycle and an optional exact deformation size."""

    f: RatPoly
    g: RatPoly
    cycle: Cycle
    epsilon: Fraction | None = None

    def __post_init__(self):
        if self.f.degree < 2:
            raise InputError("deg f must be >= 2")
        if self.g.degree < 1:
            raise InputError("g must be nonconstant")
        if self.cycle.m != self.f.degree:
            raise LengthMismatch(
                f"cycle length {self.cycle.m} != deg f {self.f.degree}")
        if self.epsilon is not None and not isinstance(self.epsilon, Fraction):
            object.__setattr__(self, "epsilon", as_fraction(self.epsilon))

    @property
    def m(self):
        return self.f.degree

    @property
    def n(self):
        return self.g.degree

    @property
    def normalization_scale(self):
        return self.f.leading

    def deformed_poly(self):
        """f + eps*g with eps kept exact rational."""
        if self.epsilon is None or self.epsilon == 0:
            raise InputError("instance has no nonzero epsilon")
        return self.f + self.g * self.epsilon


@dataclass(frozen=True)
class OraclePoly:
    """Fitted single-valued product polynomial with its audit trail.

    ``coeffs`` are in the scaled variable u = t/radius with an overall
    magnitude 10**scale_log10 removed; zeros are reported in t units and
    each has been re-verified against a vanishing branch.
    """

    kind: str
    coeffs: tuple
    radius: float
    scale_log10: float
    declared_degree_bound: int
    fitted_degree: int
    fit_residual: float
    identically_zero: bool
    precision_dps: int | None
    zeros: tuple

    def as_dict(self):
        return {
            "kind": self.kind,
            "degree_bound": self.declared_degree_bound,
            "fitted_degree": self.fitted_degree,
            "fit_residual": repr(self.fit_residual),
            "radius": repr(self.radius),
            "scale_log10": repr(self.scale_log10),
            "identically_zero": self.identically_zero,
            "precision_dps": self.precision_dps,
            "coefficients_unit_circle": [[repr(c.real), repr(c.imag)]
                                         for c in self.coeffs],
        }


@dataclass(frozen=True)
class BrieskornBasis:
    generators: tuple  # of RatPoly f^i * z^j
    dimension: int


# -- integrals ---------------------------------------------------------------

def abelian_integral(inst, fiber, weights=None):
    """sum_j w_j g(z_j) over an ordered fiber; the first-order term of the
    displacement is the negative of this value."""
    if weights is None:
        weights = inst.cycle.weights
    weights = tuple(weights) + (0,) * (len(fiber.roots) - len(weights))
    if len(weights) != len(fiber.roots):
        raise LengthMismatch("more weights than fiber points")
    gc = inst.g.to_complex()
    return sum(w * gc.evaluate(z) for w, z in zip(weights, fiber.roots) if w)


def displacement(inst, t, branch_fiber, settings=DEFAULT):
    """sum_j n_j f(w_j) on a fiber of f + eps*g, checked against the exact
    identity sum n_j f(w_j) = -eps * sum n_j g(w_j)."""
    if inst.epsilon is None:
        raise InputError("displacement requires epsilon")
    if inst.epsilon == 0:
        return 0j
    weights = inst.cycle.padded(len(branch_fiber.roots))
    fc = inst.f.to_complex()
    gc = inst.g.to_complex()
    delta = sum(w * fc.evaluate(z) for w, z in zip(weights, branch_fiber.roots) if w)
    gsum = sum(w * gc.evaluate(z) for w, z in zip(weights, branch_fiber.roots) if w)
    eps = float(inst.epsilon)
    scale = 1.0 + abs(t) + abs(delta) + abs(eps * gsum)
    if abs(delta + eps * gsum) > settings.tol_identity * scale:
        raise IdentityViolation(
            f"displacement identity violated at t={t}: {delta} vs {-eps * gsum}")
    return delta


def reduce_deformation(f, g):
    """Strip multiples of powers of f from g without changing any integral.

    Returns (g_tilde, subtracted) with g = sum a_i f^k_i + g_tilde exactly
    and deg g_tilde not a multiple of deg f (or g_tilde = 0).  Constants
    count as the k = 0 power.
    """
    if f.degree < 2:
        raise InputError("reduction requires deg f >= 2")
    m = f.degree
    g_tilde = g
    subtracted = []
    while not g_tilde.is_zero and g_tilde.degree % m == 0:
        k = g_tilde.degree // m
        a = g_tilde.leading / f.leading ** k
        g_tilde = g_tilde - f ** k * a
        subtracted.append((a, k))
    return g_tilde, subtracted


# -- product oracles ---------------------------------------------------------

def _dps_ladder(settings, min_dps):
    forced = precision_dps(settings)
    levels = []
    if forced is None and (min_dps is None or min_dps == 0):
        levels.append(None)
    start = max(forced or 0, min_dps or 0, 40)
    d = start
    while d <= settings.max_dps:
        levels.append(d)
        d *= 2
    if not levels:
        levels.append(settings.max_dps)
    return levels


class _ProductSampler:
    """Evaluates the branch product N(t) at double or extended precision.

    Assignments whose restriction to the support of the weight vector
    coincide produce identical factors, so the product is evaluated on the
    distinct support patterns and powered by their multiplicities.
    """

    def __init__(self, p, integrand, weights, assignments):
        self.p = p
        self.integrand = integrand
        self.weights = tuple(weights)
        self.pc = p.to_complex()
        self.ic = integrand.to_complex()
        support = [j for j, w in enumerate(weights) if w]
        patterns = {}
        for phi in assignments:
            key = tuple(phi[j] for j in support)
            patterns[key] = patterns.get(key, 0) + 1
        self.patterns = tuple(patterns)
        self.counts = np.array(list(patterns.values()), dtype=np.int64)
        self.total_factors = int(self.counts.sum())
        self.index = np.array(self.patterns, dtype=np.intp)
        self.wvec = np.array([complex(weights[j]) for j in support])
        self.wabs = float(sum(abs(w) for w in self.weights))
        self._mp_cache = {}

    @property
    def n_factors(self):
        return self.total_factors

    def factors_d(self, roots):
        vals = self.ic.evaluate(np.asarray(roots, dtype=complex))
        return vals[self.index] @ self.wvec, float(np.max(np.abs(vals)))

    def fiber_d(self, t, settings, init=None):
        return roots_raw(self.pc.minus(t).coeffs, settings, init=init)

    def _mp_coeffs(self, poly, dps):
        key = (id(poly), dps)
        if key not in self._mp_cache:
            with mp.workdps(dps):
                self._mp_cache[key] = [
                    mp.mpf(c.numerator) / mp.mpf(c.denominator)
                    for c in poly.coeffs]
        return self._mp_cache[key]

    def fiber_mp(self, t, dps, init=None):
        coeffs = list(self._mp_coeffs(self.p, dps))
        with mp.workdps(dps):
            coeffs[0] = coeffs[0] - t
        return aberth_mp(coeffs, dps, init=init)

    def factors_mp(self, roots, dps):
        icoeffs = self._mp_coeffs(self.integrand, dps)
        with mp.workdps(dps):
            vals = [horner_mp(icoeffs, z) for z in roots]
            vmax = max(abs(v) for v in vals)
            factors = []
            for pattern in self.patterns:
                acc = mp.mpc(0)
                for w, idx in zip(self.wvec, pattern):
                    acc += complex(w) * vals[idx]
                factors.append(acc)
            return factors, vmax

    def branch_residual_d(self, t, settings):
        """min over assignments of |factor| relative to the factor scale."""
        roots = self.fiber_d(t, settings)
        factors, vmax = self.factors_d(roots)
        scale = self.wabs * vmax + 1e-300
        return float(np.min(np.abs(factors))) / scale

    def log_abs_d(self, t, settings):
        """log |N(t)| up to the constant prescale (-inf at exact zeros)."""
        roots = self.fiber_d(t, settings)
        factors, _ = self.factors_d(roots)
        absf = np.abs(factors)
        if np.any(absf == 0.0):
            return -math.inf
        return float(np.sum(self.counts * np.log(absf)))

    def log_abs_mp(self, t, dps):
        with mp.workdps(dps):
            roots = self.fiber_mp(mp.mpc(t), dps)
            factors, _ = self.factors_mp(roots, dps)
            total = mp.mpf(0)
            for count, v in zip(self.counts, factors):
                a = abs(v)
                if a == 0:
                    return -math.inf
                total += int(count) * mp.log(a)
            return float(total)

    def ring_ratio(self, t, settings, dps=None):
        """|N| at a claimed zero vs max |N| on a small surrounding ring.

        Scale free and multiplicity friendly: a genuine zero of
        multiplicity k extracted with error e scores ~ (e/delta)^k, while a
        phantom root of the fitted polynomial scores O(1).
        """
        delta = settings.ring_delta * (1.0 + abs(t))
        ring = [t + delta * cmath.exp(1j * math.pi * (2 * k + 1) / 4)
                for k in range(4)]
        if dps is None:
            center = self.log_abs_d(t, settings)
            edge = max(self.log_abs_d(z, settings) for z in ring)
        else:
            center = self.log_abs_mp(t, dps)
            edge = max(self.log_abs_mp(z, dps) for z in ring)
        if center == -math.inf:
            return 0.0
        if edge == -math.inf:
            return 1.0
        return math.exp(min(700.0, center - edge))


def _fit_double(sampler, degree_bound, radius, settings):
    k_count = settings.samples_factor * (degree_bound + 1)
    samples = np.zeros(k_count, dtype=complex)
    # a branch vanishing to noise at every sample means the product is
    # identically zero (a nonzero polynomial of degree <= D cannot be tiny
    # at all K > D samples)
    factor_zero_tol = 100.0 * settings.identically_zero
    all_zero = True
    log_prescale = None
    prev = None
    counts = sampler.counts
    for k in range(k_count):
        t = radius * cmath.exp(2j * cmath.pi * k / k_count)
        roots = sampler.fiber_d(t, settings, init=prev)
        prev = roots
        factors, vmax = sampler.factors_d(roots)
        absf = np.abs(factors) + 1e-300
        scale = sampler.wabs * vmax + 1e-300
        if float(np.min(absf)) > factor_zero_tol * scale:
            all_zero = False
        if log_prescale is None:
            log_prescale = float(np.sum(counts * np.log(absf)) / counts.sum())
        samples[k] = np.prod((factors * np.exp(-log_prescale)) ** counts)
    if all_zero:
        return None, None, 0.0, log_prescale * sampler.n_factors
    max_abs = float(np.max(np.abs(samples)))
    coeffs = np.fft.fft(samples) / k_count
    tail = float(np.max(np.abs(coeffs[degree_bound + 1:]))) if degree_bound + 1 < k_count else 0.0
    residual = tail / max_abs
    return coeffs[:degree_bound + 1], max_abs, residual, log_prescale * sampler.n_factors


def _fit_mp(sampler, degree_bound, radius, settings, dps):
    k_count = settings.samples_factor * (degree_bound + 1)
    with mp.workdps(dps):
        samples = []
        factor_zero_tol = mp.mpf(10) ** (-(dps - 8))
        all_zero = True
        log_prescale = None
        prev = None
        tiny = mp.mpf(10) ** (-3 * dps)
        counts = [int(c) for c in sampler.counts]
        total = sampler.n_factors
        for k in range(k_count):
            t = radius * mp.expjpi(mp.mpf(2 * k) / k_count)
            roots = sampler.fiber_mp(t, dps, init=prev)
            prev = roots
            factors, vmax = sampler.factors_mp(roots, dps)
            scale = sampler.wabs * vmax + tiny
            if min(abs(v) for v in factors) > factor_zero_tol * scale:
                all_zero = False
            if log_prescale is None:
                log_prescale = sum(c * mp.log(abs(v) + tiny)
                                   for c, v in zip(counts, factors)) / total
            rescale = mp.exp(-log_prescale)
            value = mp.mpc(1)
            for c, v in zip(counts, factors):
                value *= (v * rescale) ** c
            samples.append(value)
        if all_zero:
            return None, None, 0.0, float(log_prescale * sampler.n_factors)
        max_abs = max(abs(s) for s in samples)
        coeffs = dft_fit_mp(samples, dps)
        tail = max(abs(c) for c in coeffs[degree_bound + 1:]) if degree_bound + 1 < k_count else mp.mpf(0)
        residual = float(tail / max_abs)
        return coeffs[:degree_bound + 1], max_abs, residual, float(log_prescale * sampler.n_factors)


def _fitted_degree(coeffs, tail_abs, max_abs):
    thresh = max(10.0 * tail_abs, 1e-13 * max_abs)
    deg = 0
    for d in range(len(coeffs) - 1, -1, -1):
        if abs(coeffs[d]) > thresh:
            deg = d
            break
    return deg


class _RadiusTooSmall(Exception):
    """Extraction put zeros well outside the sampling circle."""

    def __init__(self, far):
        super().__init__(f"zero magnitudes near {far}")
        self.far = far


def _verify_zeros(sampler, zeros, settings):
    """Ring-verify one representative per distinct zero.

    The ring test resolves ratios down to the double-precision log floor,
    far below the acceptance threshold, so it always runs in doubles no
    matter what precision produced the fit.
    """
    reps = []
    for z in zeros:
        if all(abs(z - r) > 1e-6 * (1.0 + abs(r)) for r in reps):
            reps.append(z)
    return all(sampler.ring_ratio(z, settings) <= settings.root_verify
               for z in reps)


def _build_oracle(kind, sampler, degree_bound, radius, settings, min_dps,
                  mult=1):
    """Sample, fit, extract, and ring-verify at increasing precision.

    ``mult`` is the expected zero multiplicity (the symmetry order of the
    cycle); it drives the accuracy demanded from the root extraction,
    since a k-fold root converges only linearly and its location error is
    the k-th root of the residual.
    """
    last_residual = None
    for dps in _dps_ladder(settings, min_dps):
        if dps is None:
            coeffs, max_abs, residual, log_scale = _fit_double(
                sampler, degree_bound, radius, settings)
        else:
            coeffs, max_abs, residual, log_scale = _fit_mp(
                sampler, degree_bound, radius, settings, dps)
        if coeffs is None:
            return OraclePoly(kind, (), radius, log_scale / math.log(10.0),
                              degree_bound, 0, 0.0, True, dps, ())
        last_residual = residual
        if residual > settings.tol_fit:
            continue
        tail_abs = residual * max_abs
        with mp.workdps(dps or 15):
            fitted = _fitted_degree(coeffs, tail_abs, max_abs)
            if fitted == 0:
                zeros = ()
            elif dps is None:
                u_roots = np.roots(np.array(coeffs[fitted::-1], dtype=complex))
                zeros = tuple(complex(radius * u) for u in u_roots)
            else:
                # roots only need ~1e-12 relative accuracy downstream;
                # multiple roots converge linearly, so cap the demand but
                # let it grow with the working precision
                tol_exp = max(12 * mult + 8, (dps - 4) // 2)
                u_roots = aberth_mp(coeffs[:fitted + 1], dps, tol_exp=tol_exp)
                zeros = tuple(complex(radius * u) for u in u_roots)
        # a crowd of zeros at or beyond the rim means the circle is too
        # small; growing it beats burning more precision
        outside = [z for z in zeros if abs(z) > 0.8 * radius]
        if zeros and len(outside) >= max(1, len(zeros) // 4):
            raise _RadiusTooSmall(max(abs(z) for z in zeros))
        if _verify_zeros(sampler, zeros, settings):
            return OraclePoly(kind, tuple(complex(c) for c in coeffs),
                              radius, log_scale / math.log(10.0),
                              degree_bound, fitted, residual, False, dps,
                              zeros)
    raise FitRejected(
        f"{kind} oracle fit failed at every precision (last residual "
        f"{last_residual})")


def _matching_zero_sets(a, b):
    if len(a.zeros) != len(b.zeros):
        return False
    za = sorted(a.zeros, key=lambda z: (abs(z), z.real, z.imag))
    zb = sorted(b.zeros, key=lambda z: (abs(z), z.real, z.imag))
    return all(abs(x - y) <= 1e-4 * (1.0 + abs(x)) for x, y in zip(za, zb))


def _build_adaptive(kind, sampler, degree_bound, base_radius, settings, min_dps,
                    mult=1):
    """Grow the sampling circle until it encloses the zero set.

    The zeros of the branch product are not bounded by the critical-value
    scale, and a circle far inside them leaves the fit with an impossible
    dynamic range.  The radius grows geometrically until the fitted degree
    reaches the declared bound with all zeros well inside, or until the
    result is stable under further growth.
    """
    radius = base_radius
    best = None
    last_error = None
    for _ in range(8):
        try:
            oracle = _build_oracle(kind, sampler, degree_bound, radius,
                                   settings, min_dps, mult=mult)
        except _RadiusTooSmall as exc:
            radius = max(8.0 * radius, 4.0 * exc.far)
            continue
        except FitRejected as exc:
            last_error = exc
            radius *= 8.0
            continue
        if oracle.identically_zero:
            return oracle
        if oracle.fitted_degree == degree_bound:
            return oracle
        if best is not None and oracle.fitted_degree == best.fitted_degree \
                and _matching_zero_sets(oracle, best):
            return oracle
        best = oracle
        radius *= 8.0
    if best is not None:
        return best
    raise FitRejected(f"{kind} oracle failed at every sampling radius") \
        from last_error


def _check_caps(m, n_fiber, degree_bound, settings):
    if n_fiber > settings.oracle_fiber_cap:
        raise InputError(
            f"fiber size {n_fiber} exceeds oracle cap {settings.oracle_fiber_cap}")
    if degree_bound > settings.degree_cap:
        raise InputError(
            f"oracle degree bound {degree_bound} exceeds cap {settings.degree_cap}")


def build_tangential_oracle(inst, settings=DEFAULT):
    """Product over all fiber orderings of the integral of g on the cycle.

    When deg f divides deg g the deformation is reduced first, so the
    declared degree bound is deg(g_tilde) * (m-1)!.
    """
    m = inst.m
    g_eff = inst.g
    if inst.n % m == 0:
        g_eff, _ = reduce_deformation(inst.f, inst.g)
    crit = critical_values(inst.f, settings)
    radius = settings.radius_factor * (1.0 + crit.max_abs)
    if g_eff.is_zero:
        return OraclePoly("tangential", (), radius, 0.0, 0, 0, 0.0, True,
                          None, ())
    degree_bound = g_eff.degree * math.factorial(m - 1)
    if inst.cycle.is_simple and m > 2:
        # a simple cycle forces (d-1)(m-2)! intersection points at
        # infinity, each of which lowers the product degree by one
        d = math.gcd(m, g_eff.degree)
        degree_bound -= (d - 1) * math.factorial(m - 2)
    _check_caps(m, m, degree_bound, settings)
    assignments = tuple(itertools.permutations(range(m)))
    sampler = _ProductSampler(inst.f, g_eff, inst.cycle.weights, assignments)
    mult = symmetry_group(inst.cycle, settings).order
    min_dps = None if mult <= 2 else 10 * mult + 20
    return _build_adaptive("tangential", sampler, degree_bound, radius,
                           settings, min_dps, mult=mult)


def build_infinitesimal_oracle(inst, settings=DEFAULT):
    """Product over injections of the weight slots into the deformed fiber.

    Uses the integrand f when deg g >= deg f (lower hypersurface degree
    via the exact displacement identity) and g when deg g < deg f.
    """
    m, n = inst.m, inst.n
    p = inst.deformed_poly()
    n_fiber = p.degree
    if n_fiber != max(m, n):
        raise InputError("epsilon degenerates the leading coefficient")
    if n < m:
        degree_bound = n * math.factorial(m - 1)
        integrand = inst.g
    else:
        degree_bound = m * math.factorial(n - 1) // math.factorial(n - m)
        if n % m == 0:
            degree_bound -= math.factorial(m - 1)
        integrand = inst.f
    _check_caps(m, n_fiber, degree_bound, settings)
    crit_eps = critical_values(p, settings)
    radius = settings.radius_factor * (1.0 + crit_eps.max_abs)
    assignments = tuple(itertools.permutations(range(n_fiber), m))
    sampler = _ProductSampler(p, integrand, inst.cycle.weights, assignments)
    mult = symmetry_group(inst.cycle, settings).order
    min_dps = None if mult <= 2 else 10 * mult + 20
    return _build_adaptive("infinitesimal", sampler, degree_bound, radius,
                           settings, min_dps, mult=mult)


# -- Brieskorn data ----------------------------------------------------------

def brieskorn_dimension(m, n):
    """Dimension of the degree-n truncation of the Brieskorn modulus."""
    if m < 2 or n < 1:
        raise InputError("need m >= 2 and n >= 1")
    return n - n // m


def brieskorn_generators(f, n):
    """Generators f^i z^j; degrees are exactly the integers in [1, n] not
    divisible by deg f."""
    m = f.degree
    if m < 2 or n < 1:
        raise InputError("need deg f >= 2 and n >= 1")
    ell = n // m
    r = n - ell * m
    z = RatPoly.x()
    gens = []
    fpow = RatPoly.one()
    for i in range(ell + 1):
        top = (m - 1) if i < ell else r
        zpow = z
        for j in range(1, top + 1):
            gens.append(fpow * zpow)
            zpow = zpow * z
        fpow = fpow * f
    basis = BrieskornBasis(generators=tuple(gens), dimension=brieskorn_dimension(m, n))
    assert len(basis.generators) == basis.dimension
    return basis


def design_g_with_zeros(f, cycle, targets, n, branch=None, settings=DEFAULT):
    """A degree-<=n deformation whose integral on the chosen branch vanishes
    at every target.

    Solves the kernel of the interpolation system over the Brieskorn
    generators and re-verifies each target residual through independent
    fiber solves.  Raises SingularDesignSystem when the targets exhaust or
    degenerate the available dimensions.
    """
    basis = brieskorn_generators(f, n)
    dim = basis.dimension
    targets = [complex(t) for t in targets]
    if len(targets) >= dim:
        raise SingularDesignSystem(
            f"{len(targets)} targets with only {dim} generator dimensions")
    if not targets:
        return basis.generators[0]
    if len(set(targets)) != len(targets):
        raise InputError("targets must be pairwise distinct")
    crit = critical_values(f, settings)
    weights = cycle.weights
    m = f.degree
    if branch is None:
        branch = tuple(range(m))
    pc = f.to_complex()
    rows = []
    for t in targets:
        fib = solve_fiber(pc, t, settings, critical=crit)
        gens_at = []
        for gen in basis.generators:
            gc = gen.to_complex()
            gens_at.append(sum(w * gc.evaluate(fib.roots[branch[j]])
                               for j, w in enumerate(weights) if w))
        rows.append(gens_at)
    a = np.array(rows, dtype=complex)
    _, _, vh = np.linalg.svd(a)
    x = vh[-1].conj()
    x = x / np.linalg.norm(x)
    coeffs = [0j] * (max(gen.degree for gen in basis.generators) + 1)
    for ck, gen in zip(x, basis.generators):
        for d, c in enumerate(gen.coeffs):
            coeffs[d] += ck * complex(c)
    g = ComplexPoly(tuple(coeffs))
    # independent verification through fresh fiber solves
    scale = max(1.0, float(np.max(np.abs(a))))
    for t in targets:
        fib = solve_fiber(pc, t, settings, critical=crit)
        val = sum(w * g.evaluate(fib.roots[branch[j]])
                  for j, w in enumerate(weights) if w)
        if abs(val) > settings.tol_design * scale:
            raise SingularDesignSystem(
                f"design residual {abs(val):.2e} at target {t}; "
                "perturb the targets and retry")
    return g
