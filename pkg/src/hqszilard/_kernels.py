"""Compiled inner loops for parabolic cylinder function evaluation.

Everything here works on plain floats; Gamma-function prefactors are
computed by the caller (scipy is not available inside numba).
"""
import math

import numpy as np
from numba import njit

EPS = 2.220446049250313e-16


@njit(cache=True)
def kummer_m(p, b, z, tol, nmax):
    """Confluent hypergeometric M(p, b, z) and dM/dz by direct summation.

    Returns ``(m, dm, abs_sum, converged)`` where ``abs_sum`` is the sum of
    term magnitudes (used for the rounding-error estimate).
    """
    term = 1.0
    m = 1.0
    k_weighted = 0.0   # sum of k * t_k, gives z * dM/dz
    abs_sum = 1.0
    converged = False
    for k in range(nmax):
        term *= (p + k) / ((b + k) * (k + 1.0)) * z
        m += term
        k_weighted += (k + 1.0) * term
        abs_sum += abs(term)
        if term == 0.0 or (k > 2 and abs(term) <= tol * abs_sum):
            converged = True
            break
    if z != 0.0:
        dm = k_weighted / z
    else:
        dm = p / b
    return m, dm, abs_sum, converged


@njit(cache=True)
def pcf_kummer(a, x, c_even, c_odd, tol, nmax, c_rel):
    """D_a(x) from the even/odd Kummer decomposition about x = 0.

    ``c_even = D_a(0)`` and ``c_odd = D'_a(0)``, so that

        D_a(x) = exp(-x^2/4) [c_even M(-a/2, 1/2, x^2/2)
                              + c_odd x M((1-a)/2, 3/2, x^2/2)].

    ``c_rel`` is the relative uncertainty of the two coefficients.
    """
    z = 0.5 * x * x
    m1, dm1, s1, ok1 = kummer_m(-0.5 * a, 0.5, z, tol, nmax)
    m2, dm2, s2, ok2 = kummer_m(0.5 * (1.0 - a), 1.5, z, tol, nmax)
    g = math.exp(-0.25 * x * x)
    inner = c_even * m1 + c_odd * x * m2
    val = g * inner
    # d/dx: dz/dx = x
    dinner = c_even * dm1 * x + c_odd * (m2 + x * x * dm2)
    dval = g * (dinner - 0.5 * x * inner)
    err = (4.0 * EPS + c_rel) * g * (abs(c_even) * s1 + abs(c_odd * x) * s2)
    if not (ok1 and ok2):
        err = max(err, abs(val))
    return val, dval, err


@njit(cache=True)
def taylor_continue(y, yp, a, x, tol, kmax):
    """Carry (D_a, D_a') from 0 to ``x`` by stepwise Taylor expansion.

    The Weber equation y'' = (t^2/4 - a - 1/2) y has polynomial
    coefficients, so the local Taylor coefficients obey a three-term
    recurrence.  Steps are sized so that h * sqrt(|local wavenumber^2|)
    stays below ~2.
    """
    if x == 0.0:
        return y, yp, 0.0
    scale = math.sqrt(abs(a) + 0.5 + 0.25 * x * x)
    hmax = min(0.5, 2.0 / scale)
    nsteps = max(1, int(math.ceil(abs(x) / hmax)))
    h = x / nsteps
    err = 0.0
    t = 0.0
    c = np.zeros(kmax + 3)
    for step in range(nsteps):
        q = 0.25 * t * t - a - 0.5
        # scaled coefficients C_k = c_k h^k
        c[0] = y
        c[1] = yp * h
        ysum = c[0] + c[1]
        ypsum = c[1]
        abs_sum = abs(c[0]) + abs(c[1])
        h2 = h * h
        for k in range(kmax):
            ck2 = q * h2 * c[k]
            if k >= 1:
                ck2 += 0.5 * t * h2 * h * c[k - 1]
            if k >= 2:
                ck2 += 0.25 * h2 * h2 * c[k - 2]
            ck2 /= (k + 2.0) * (k + 1.0)
            c[k + 2] = ck2
            ysum += ck2
            ypsum += (k + 2.0) * ck2
            abs_sum += abs(ck2) * (k + 3.0)
            if k > 3:
                tail = abs(c[k + 2]) + abs(c[k + 1]) + abs(c[k])
                if tail <= tol * (abs(ysum) + abs(ypsum)):
                    break
        y = ysum
        yp = ypsum / h
        err += EPS * abs_sum
        t = (step + 1) * h
    return y, yp, err


@njit(cache=True)
def asymptotic_series(a, x, nmax):
    """Large positive x expansion of D_a(x) without its envelope.

    D_a(x) ~ g(x) * sum_s c_s x^{-2s} with g = e^{-x^2/4} x^a.  Returns
    ``(total, dtotal, rel_err)`` such that D = g * total, D' = g * dtotal;
    ``rel_err`` is the last retained term relative to the sum.  The series
    is stopped at its smallest term.
    """
    inv = 1.0 / (2.0 * x * x)
    term = 1.0
    total = 1.0
    dtotal = -0.5 * x + a / x
    last = 1.0
    for s in range(nmax):
        nxt = -term * (-a + 2.0 * s) * (-a + 2.0 * s + 1.0) / (s + 1.0) * inv
        if abs(nxt) >= abs(term) and s > 0:
            break
        term = nxt
        total += term
        dtotal += term * (-0.5 * x + (a - 2.0 * (s + 1.0)) / x)
        last = term
        if abs(term) < 1e-18 * abs(total):
            break
    return total, dtotal, abs(last / total) + 4.0 * EPS


@njit(cache=True)
def pcf_asymptotic(a, x, nmax):
    """D_a(x) for large positive x; returns ``(val, dval, abs_err)``."""
    total, dtotal, rel = asymptotic_series(a, x, nmax)
    g = math.exp(-0.25 * x * x) * x ** a
    val = g * total
    return val, g * dtotal, rel * abs(val)


@njit(cache=True)
def pcf_recessive(a, x, tol, kmax):
    """D_a(x) in the decaying region x > 0 by backward integration.

    Start far out at X where the asymptotic series is accurate to rounding,
    then continue the Weber equation back to ``x``.  The decaying solution
    grows in that direction, so the integration is stable.  A running log
    scale keeps the intermediate values finite.
    """
    big = max(x, 2.0 * math.sqrt(abs(a) + 1.0)) + 4.0
    total, dtotal, rel = asymptotic_series(a, big, 400)
    while rel > 1e-15 and big < 1e3:
        big *= 1.25
        total, dtotal, rel = asymptotic_series(a, big, 400)
    logscale = -0.25 * big * big + a * math.log(big)
    y = total
    yp = dtotal
    span = x - big
    scale = math.sqrt(abs(a) + 0.5 + 0.25 * big * big)
    hmax = min(0.5, 2.0 / scale)
    nsteps = max(1, int(math.ceil(abs(span) / hmax)))
    h = span / nsteps
    c = np.zeros(kmax + 3)
    t = big
    h2 = h * h
    for step in range(nsteps):
        q = 0.25 * t * t - a - 0.5
        c[0] = y
        c[1] = yp * h
        ysum = c[0] + c[1]
        ypsum = c[1]
        for k in range(kmax):
            ck2 = q * h2 * c[k]
            if k >= 1:
                ck2 += 0.5 * t * h2 * h * c[k - 1]
            if k >= 2:
                ck2 += 0.25 * h2 * h2 * c[k - 2]
            ck2 /= (k + 2.0) * (k + 1.0)
            c[k + 2] = ck2
            ysum += ck2
            ypsum += (k + 2.0) * ck2
            if k > 3:
                tail = abs(c[k + 2]) + abs(c[k + 1]) + abs(c[k])
                if tail <= tol * (abs(ysum) + abs(ypsum)):
                    break
        norm = abs(ysum) + abs(ypsum / h) * abs(h)
        y = ysum / norm
        yp = ypsum / h / norm
        logscale += math.log(norm)
        t = big + (step + 1) * h
    f = math.exp(logscale)
    val = y * f
    dval = yp * f
    err = (rel + EPS * (nsteps + 4)) * abs(val)
    return val, dval, err
