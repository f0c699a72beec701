"""Numerical knobs shared across the library.

All tolerances live on one frozen dataclass so a CLI run can override them
in a single place and embed the resolved values in its report.
"""

from dataclasses import dataclass, asdict, replace


@dataclass(frozen=True)
class Settings:
    # root finding
    tol_root: float = 1e-11          # relative residual for accepted roots
    tol_cluster: float = 1e-8        # merge radius for multiple roots
    max_newton_iter: int = 200

    # fibers and continuation
    exclusion_scale: float = 1e-3    # exclusion radius = scale*(1 + spread of critical values)
    step_floor: float = 1e-12

    # oracle sampling and fit
    radius_factor: float = 4.0       # sample circle radius = factor*(1 + max |critical value|)
    samples_factor: int = 2          # number of samples = factor*(degree bound + 1)
    degree_cap: int = 64
    tol_fit: float = 1e-8            # relative tail tolerance of the fit
    identically_zero: float = 1e-12  # relative threshold declaring the oracle identically zero
    ring_delta: float = 1e-3         # zero-verification ring radius factor
    root_verify: float = 1e-4        # |N| at a zero vs max |N| on its ring
    precision_bits: int | None = None  # force extended precision; None = adaptive
    max_dps: int = 320               # adaptive-precision ceiling (decimal digits)

    # zero grouping and classification
    cluster_scale: float = 1e-6      # zero-cluster radius factor (scale aware)
    exclusion_floor: float = 1e-7    # adaptive near-critical exclusion floor
    match_scale: float = 1e-5        # tangential-zero matching factor
    divergence_factor: float = 10.0  # |t| beyond factor*R flags an escaping branch

    # cycle certificates
    infinity_zero_tol: float = 1e-9  # |cyclotomic sum| below tol*sum|n_j| counts as zero
    weight_bound: int = 9
    cycle_retry_cap: int = 10_000
    fiber_cap: int = 8               # hard cap for factorial enumeration
    oracle_fiber_cap: int = 6

    # design and identity checks
    tol_design: float = 1e-9
    tol_identity: float = 1e-9

    # randomized experiments
    morse_separation: float = 1e-4   # critical values must be separated by scale*spread

    def with_overrides(self, **kwargs):
        return replace(self, **kwargs)

    def as_dict(self):
        return asdict(self)


DEFAULT = Settings()


def precision_dps(settings):
    """Decimal digits for forced extended precision, or None for adaptive."""
    if settings.precision_bits is None:
        return None
    return max(20, int(settings.precision_bits * 0.30103) + 2)
