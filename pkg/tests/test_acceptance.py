"""Acceptance suite: one test per criterion, each printing a verdict line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
lines.  Randomized suites use fixed seeds and are fully deterministic.
"""

import json
import math
import random
import time
from fractions import Fraction

import pytest

from cycle_integrals.config import DEFAULT
from cycle_integrals.counting import (classify_alien, count_infinitesimal_zeros,
                                      count_tangential_zeros,
                                      run_sharpness_experiment,
                                      _random_morse_poly, _random_poly)
from cycle_integrals.cycles import (Cycle, bound_simple, random_generic_cycle)
from cycle_integrals.errors import CycleIntegralsError
from cycle_integrals.melnikov import (Instance, abelian_integral,
                                      brieskorn_dimension, brieskorn_generators,
                                      design_g_with_zeros, reduce_deformation)
from cycle_integrals.poly import RatPoly
from cycle_integrals.tracking import monodromy, orbit_rank, solve_fiber

PAPER_F = RatPoly([0, 0, 1, 1])
PAPER_G = RatPoly([0, 1, 3])
PAPER_C = Cycle((1, 1, -2))
SCHEDULE = [Fraction(1, 50), Fraction(1, 100), Fraction(1, 200)]

_suites = {}


def tangential_suite(m, n, trials=20, seed=2026):
    key = (m, n, "tangential", trials, seed)
    if key not in _suites:
        _suites[key] = run_sharpness_experiment(m, n, "tangential", trials,
                                                seed=seed)
    return _suites[key]


def infinitesimal_suite(m, n, trials=20, seed=2026):
    key = (m, n, "infinitesimal", trials, seed)
    if key not in _suites:
        _suites[key] = run_sharpness_experiment(m, n, "infinitesimal", trials,
                                                seed=seed)
    return _suites[key]


def verdict(number, passed, detail):
    print(f"ACCEPTANCE {number}: {'PASS' if passed else 'FAIL'} - {detail}")
    assert passed, f"criterion {number}: {detail}"


def test_criterion_01_paper_tangential_count():
    start = time.time()
    report = count_tangential_zeros(Instance(PAPER_F, PAPER_G, PAPER_C))
    elapsed = time.time() - start
    verdict(1, report.count == 0 and elapsed < 1.0,
            f"worked example tangential count {report.count} (expect 0) "
            f"in {elapsed:.2f}s")


def test_criterion_02_paper_infinitesimal_and_alien():
    start = time.time()
    inst = Instance(PAPER_F, PAPER_G, PAPER_C, epsilon=Fraction(1, 100))
    count = count_infinitesimal_zeros(inst).count
    report = classify_alien(inst, SCHEDULE)
    elapsed = time.time() - start
    ok = (count == 2 and report.alien_count == 2 and report.regular_count == 0
          and elapsed < 10.0)
    verdict(2, ok, f"worked example infinitesimal count {count} (expect 2), "
                   f"alien/regular {report.alien_count}/{report.regular_count} "
                   f"(expect 2/0) in {elapsed:.1f}s")


def test_criterion_03_tangential_sharpness():
    start = time.time()
    expected = {(3, 2): 4, (3, 4): 8, (4, 3): 18}
    details = []
    ok = True
    for (m, n), bound in expected.items():
        suite = tangential_suite(m, n)
        attained = suite["max_count"] == bound
        never_exceeded = all(c <= bound for c in suite["counts"])
        ok &= attained and never_exceeded and len(suite["counts"]) >= 20
        details.append(f"({m},{n}): max {suite['max_count']}/{bound} over "
                       f"{len(suite['counts'])} trials")
    elapsed = time.time() - start
    ok &= elapsed < 300.0
    verdict(3, ok, "; ".join(details) + f"; {elapsed:.0f}s")


def test_criterion_04_tangential_exceptional_degrees():
    s33 = tangential_suite(3, 3)
    s25 = tangential_suite(2, 5)
    ok = (s33["max_count"] == 4 and all(c <= 4 for c in s33["counts"])
          and s25["max_count"] == 2 and all(c <= 2 for c in s25["counts"]))
    verdict(4, ok, f"(3,3): max {s33['max_count']}/4 after reduction; "
                   f"(2,5): max {s25['max_count']}/2")


def test_criterion_05_infinitesimal_sharpness():
    start = time.time()
    expected = {(3, 2): 4, (3, 4): 18, (3, 3): 4, (2, 3): 1}
    details = []
    ok = True
    for (m, n), bound in expected.items():
        suite = infinitesimal_suite(m, n)
        ok &= suite["max_count"] == bound
        ok &= all(c <= bound for c in suite["counts"])
        details.append(f"({m},{n}): max {suite['max_count']}/{bound}")
    elapsed = time.time() - start
    ok &= elapsed < 600.0
    verdict(5, ok, "; ".join(details) + f"; {elapsed:.0f}s")


def test_criterion_06_partition_law():
    start = time.time()
    successes = 0
    holds = 0
    trial = 0
    while successes < 20 and trial < 26:
        rng = random.Random(f"partition:{trial}")
        trial += 1
        try:
            f = _random_morse_poly(rng, 3, DEFAULT)
            g = _random_poly(rng, 4)
            cycle = random_generic_cycle(3, 4, f"partition:{trial}:c")
            inst = Instance(f, g, cycle, epsilon=Fraction(1, 100))
            report = classify_alien(inst, SCHEDULE)
        except CycleIntegralsError:
            continue
        successes += 1
        if (report.regular_count + report.alien_count == report.infinitesimal_count
                and report.regular_count <= report.tangential_count):
            holds += 1
    no_alien = True
    for trial in range(6):
        rng = random.Random(f"noalien:{trial}")
        f = _random_morse_poly(rng, 3, DEFAULT)
        g = _random_poly(rng, 2)
        cycle = random_generic_cycle(3, 2, f"noalien:{trial}:c")
        report = classify_alien(Instance(f, g, cycle, epsilon=Fraction(1, 100)),
                                SCHEDULE)
        no_alien &= report.alien_count == 0
    elapsed = time.time() - start
    ok = successes >= 20 and holds == successes and no_alien
    verdict(6, ok, f"partition held on {holds}/{successes} successful (3,4) "
                   f"trials; (3,2) alien count 0: {no_alien}; {elapsed:.0f}s")


def test_criterion_07_simple_cycle_bounds():
    start = time.time()
    s34 = run_sharpness_experiment(3, 4, "tangential", 12, seed=77,
                                   cycle_mode="simple")
    s46 = run_sharpness_experiment(4, 6, "tangential", 3, seed=77,
                                   cycle_mode="simple")
    b34, b46 = bound_simple(3, 4), bound_simple(4, 6)
    ok = (s34["max_count"] == b34 == 3
          and all(c <= b34 for c in s34["counts"])
          and all(c <= b46 for c in s46["counts"])
          and b46 == 7 and s46["counts"])
    elapsed = time.time() - start
    verdict(7, ok, f"simple (3,4): max {s34['max_count']}/3; "
                   f"(4,6): counts {s46['counts']} <= 7; {elapsed:.0f}s")


def test_criterion_08_oracle_degree_law():
    ok = True
    details = []
    for m, n in ((3, 2), (3, 4), (4, 3)):
        suite = tangential_suite(m, n)
        want = n * math.factorial(m - 1)
        degrees = [r["fitted_degree"] for r in suite["results"]]
        residuals = [r["fit_residual"] for r in suite["results"]]
        ok &= all(d == want for d in degrees)
        ok &= all(res <= 1e-8 for res in residuals)
        details.append(f"({m},{n}): fitted degree {want} on "
                       f"{len(degrees)} instances, max residual "
                       f"{max(residuals):.1e}")
    verdict(8, ok, "; ".join(details))


def test_criterion_09_reduction_invariance():
    rng = random.Random(31)
    checked = 0
    max_err = 0.0
    while checked < 50:
        m = rng.choice([2, 3, 4])
        f = RatPoly([Fraction(rng.randint(-5, 5), rng.randint(1, 2))
                     for _ in range(m)] + [Fraction(1)])
        if f.degree != m:
            continue
        n = rng.randint(1, 6)
        g = RatPoly([Fraction(rng.randint(-5, 5)) for _ in range(n)]
                    + [Fraction(rng.randint(1, 4))])
        head = [rng.randint(-4, 4) for _ in range(m - 1)]
        w = tuple(head) + (-sum(head),)
        if not any(w):
            continue
        cycle = Cycle(w)
        g_tilde, _ = reduce_deformation(f, g)
        t = complex(rng.uniform(2.0, 5.0), rng.uniform(0.5, 2.0))
        fib_a = solve_fiber(f.to_complex(), t)
        fib_b = solve_fiber(f.to_complex(), t)
        va = abelian_integral(Instance(f, g, cycle), fib_a)
        vb = (abelian_integral(Instance(f, g_tilde, cycle), fib_b)
              if not g_tilde.is_zero else 0j)
        err = abs(va - vb) / (1.0 + abs(va))
        max_err = max(max_err, err)
        if err > 1e-9:
            break
        checked += 1
    powers_ok = True
    f = PAPER_F
    cycle = Cycle((1, 2, -3))
    fib = solve_fiber(f.to_complex(), 2.5)
    for k in (1, 2, 3):
        val = abelian_integral(Instance(f, f ** k, cycle), fib)
        scale = sum(abs(w) for w in cycle.weights) * max(
            abs(f.to_complex().evaluate(z)) ** k for z in fib.roots)
        powers_ok &= abs(val) <= 1e-10 * (1.0 + scale)
    ok = checked == 50 and powers_ok
    verdict(9, ok, f"relative gap <= 1e-9 on {checked}/50 random instances "
                   f"(max {max_err:.1e}); powers of f integrate to zero: "
                   f"{powers_ok}")


def test_criterion_10_monodromy_orbit_ranks():
    start = time.time()
    f = RatPoly([0, 0, -1, 0, 1])
    rep = monodromy(f, basepoint=-0.125, ordering="real")
    rank1 = orbit_rank(f, Cycle((1, -1, 0, 0)), rep=rep)
    rank2 = orbit_rank(f, Cycle((0, 1, -1, 0)), rep=rep)
    elapsed = time.time() - start
    ok = rank1 == 3 and rank2 < 3 and elapsed < 5.0
    verdict(10, ok, f"orbit ranks {rank1} (expect 3) and {rank2} (expect < 3) "
                    f"in {elapsed:.2f}s")


def test_criterion_11_brieskorn_and_design():
    ok = True
    for m in range(2, 7):
        f = RatPoly([0] * m + [1]) + RatPoly([1, 1])
        for n in range(1, 13):
            dim = brieskorn_dimension(m, n)
            ok &= dim == n - n // m
            degrees = [g.degree for g in brieskorn_generators(f, n).generators]
            ok &= degrees == [d for d in range(1, n + 1) if d % m != 0]
            ok &= len(degrees) == dim
    cycle = Cycle((1, 2, -3))
    targets = [1.0, 2.0]
    g = design_g_with_zeros(PAPER_F, cycle, targets, 4)
    pc = PAPER_F.to_complex()
    residual = max(
        abs(sum(w * g.evaluate(z) for w, z in zip(cycle.weights,
                                                  solve_fiber(pc, t).roots)))
        for t in targets)
    ok &= residual <= 1e-9
    ok &= len(targets) == brieskorn_dimension(3, 4) - 1
    verdict(11, ok, f"dimension formula exhaustive on 2<=m<=6, 1<=n<=12; "
                    f"design residual {residual:.1e} <= 1e-9 at (3,4)")


def test_criterion_12_growth_of_zero_to_dimension_ratio():
    r3 = tangential_suite(3, 2)["max_count"] / brieskorn_dimension(3, 2)
    r4 = tangential_suite(4, 3)["max_count"] / brieskorn_dimension(4, 3)
    ok = r3 == 2.0 and r4 == 6.0 and r3 < r4
    verdict(12, ok, f"attained ratio at m=3: {r3} (expect 2); m=4: {r4} "
                    f"(expect 6); strictly increasing: {r3 < r4}")


def test_criterion_13_determinism(tmp_path):
    from cycle_integrals.cli import main
    instance = {"f": [0, 0, 1, 1], "g": [0, 1, 3], "cycle": [1, 1, -2],
                "epsilon": "1/100", "seed": 11, "precision_bits": None}
    src = tmp_path / "inst.json"
    src.write_text(json.dumps(instance))
    out_a = tmp_path / "a.json"
    out_b = tmp_path / "b.json"
    assert main(["infinitesimal", "--instance", str(src),
                 "--output", str(out_a)]) == 0
    assert main(["infinitesimal", "--instance", str(src),
                 "--output", str(out_b)]) == 0
    bitwise = out_a.read_bytes() == out_b.read_bytes()
    sa = run_sharpness_experiment(3, 2, "tangential", 5, seed=99)
    sb = run_sharpness_experiment(3, 2, "tangential", 5, seed=99)
    summaries = json.dumps(sa, sort_keys=True) == json.dumps(sb, sort_keys=True)
    ok = bitwise and summaries
    verdict(13, ok, f"bit-identical reports: {bitwise}; "
                    f"identical experiment summaries: {summaries}")
