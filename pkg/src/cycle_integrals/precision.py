"""mpmath twins of the numeric kernels.

Used by the oracle builder when double precision cannot separate the
coefficient scales (singular perturbations spread the zeros of the
infinitesimal oracle over many orders of magnitude).  Every function takes
an explicit ``dps`` so results are deterministic.
"""

import math

import mpmath as mp

from .errors import NonConvergence


def to_mpc(x):
    if isinstance(x, mp.mpc):
        return x
    return mp.mpc(x)


def horner_mp(coeffs, x):
    acc = mp.mpc(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def aberth_mp(coeffs, dps, init=None, max_iter=400, tol_exp=None):
    """All roots of an ascending mpc coefficient list at ``dps`` digits.

    ``tol_exp`` caps the residual demand at 10**-tol_exp; multiple roots
    converge only linearly, so callers that need limited root accuracy
    should not pay for the full working precision.
    """
    with mp.workdps(dps):
        c = [to_mpc(v) for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        d = len(c) - 1
        if d < 1:
            return []
        lead = c[-1]
        c = [v / lead for v in c]
        if d == 1:
            return [-c[0]]
        dc = [i * c[i] for i in range(1, d + 1)]
        if tol_exp is None:
            tol_exp = dps - 4
        # residual acceptance in log2 via mp.mag and a float scale bound,
        # which avoids a full-precision scale evaluation per root per step
        log2_tol = -min(tol_exp, dps - 4) * 3.3219280948873626
        clog2 = [mp.mag(v) if v != 0 else -(10 ** 9) for v in c]

        def log2_scale(zk):
            la = float(mp.mag(zk)) if zk != 0 else -1e9
            return max(lc + i * la for i, lc in enumerate(clog2))

        if init is not None and len(init) == d:
            z = [to_mpc(v) for v in init]
            if len({(mp.nstr(v.real, 12), mp.nstr(v.imag, 12)) for v in z}) < d:
                init = None
        if init is None or len(init) != d:
            radius = 1 + max(abs(v) for v in c[:-1])
            z = [mp.mpf("0.7") * radius * mp.expjpi(2 * (k + mp.mpf("0.27")) / d + mp.mpf("0.13"))
                 for k in range(d)]

        for _ in range(max_iter):
            p = [horner_mp(c, zk) for zk in z]
            conv = [mp.mag(pk) <= log2_tol + log2_scale(zk) + 2
                    for pk, zk in zip(p, z)]
            if all(conv):
                return z
            new_z = list(z)
            for k in range(d):
                if conv[k]:
                    continue
                dpk = horner_mp(dc, z[k])
                if dpk == 0:
                    new_z[k] = z[k] + mp.mpf("0.05") * (1 + abs(z[k]))
                    continue
                w = p[k] / dpk
                s = mp.mpc(0)
                for j in range(d):
                    if j != k:
                        diff = z[k] - z[j]
                        if diff == 0:
                            diff = mp.mpf(10) ** (-dps) * (1 + abs(z[k]))
                        s += 1 / diff
                denom = 1 - w * s
                if denom == 0:
                    denom = mp.mpc(1)
                new_z[k] = z[k] - w / denom
            z = new_z

        # last resort: mpmath's own solver
        try:
            z = mp.polyroots([v for v in reversed(c)], maxsteps=200,
                             extraprec=dps * 4)
            return [to_mpc(v) for v in z]
        except Exception as exc:  # mp raises bare exceptions on failure
            raise NonConvergence(f"mp root finder failed on degree {d}") from exc


def dft_fit_mp(samples, dps):
    """Coefficients c with samples[k] = sum_d c[d] * w^(k d), w = exp(2 pi i/K)."""
    with mp.workdps(dps):
        k_count = len(samples)
        unity = [mp.expjpi(mp.mpf(-2 * k) / k_count) for k in range(k_count)]
        values = [to_mpc(s) for s in samples]
        out = []
        for d in range(k_count):
            acc = mp.mpc(0)
            for k, s in enumerate(values):
                acc += s * unity[(d * k) % k_count]
            out.append(acc / k_count)
        return out
