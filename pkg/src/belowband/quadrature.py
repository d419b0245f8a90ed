"""Quadrature engines for torus Green's-function integrals.

Both engines evaluate the family of integrals

    (2*pi)^-n * integral over (-pi,pi]^n of  g(p) / (E(p) - z) dp,

where ``E(p) = sum_j (1 - cos p_j)`` is the nearest-neighbor dispersion and
``g`` is one of ``1``, ``cos p_1``, ``cos^2 p_1``, ``cos p_1 cos p_2``,
``sin^2 p_1`` or a subtracted combination of those.  Results are returned as
plain ``{name: value}`` dictionaries; the public wrapper types live in
:mod:`belowband.green`.

Engine A (``trapezoid_*``) is the tensor-product periodic trapezoidal rule.
For z < 0 the integrand is analytic and periodic, so the rule converges
geometrically with rate set by the width of the analyticity strip,
``arccosh(1 - z)``.  It is practical for n <= 3.

Engine B (``laplace_*``) uses the Laplace representation

    1/(E(p) - z) = integral_0^inf exp(-(n - z) t) exp(t * sum_j cos p_j) dt,

which factorizes the torus integral into a one-dimensional integral over
products of exponentially scaled modified Bessel functions e^-t I_k(t).
It works in any dimension and remains valid at z = 0 for every integral
that is finite there (power-law tail ~ t^(-m/2)).

All node sets are deterministic functions of the arguments, and partial
sums are accumulated in a fixed order, so repeated evaluations are
bit-identical and safe to run concurrently.
"""

from __future__ import annotations

import numpy as np
import scipy.special as sp

__all__ = [
    "QuadratureError",
    "laplace_integrals",
    "trapezoid_integrals",
    "trapezoid_threshold",
    "required_grid_points",
    "finite_at_threshold",
]


class QuadratureError(RuntimeError):
    """Raised when an engine cannot reach the requested accuracy."""


# Quantities evaluated per dimension.  ``cd`` is c - d and ``ad`` is a - d,
# computed from difference integrands so they stay finite (and accurate)
# where c, d, a individually diverge.
_NAMES_N1 = ("a", "b", "c", "s")
_NAMES = ("a", "b", "c", "d", "s", "cd", "ad")

# Largest trapezoid grid per dimension before we give up.
_GRID_CAP = {1: 1 << 20, 2: 4096, 3: 1152}

_ASYM_SWITCH = 1e8  # above this, scipy.special.ive loses accuracy / NaNs


def integral_names(n: int) -> tuple[str, ...]:
    return _NAMES_N1 if n == 1 else _NAMES


def finite_at_threshold(n: int) -> frozenset[str]:
    """Names of integrals that stay finite at z = 0 in dimension ``n``.

    The Laplace integrand of quantity q decays like t^(-m_q/2) with
    m = n for a, b, c, d;  m = n + 2 for s and a - d;  m = n + 4 for c - d.
    Finiteness requires m > 2.
    """
    if n == 1:
        return frozenset({"s"})
    if n == 2:
        return frozenset({"s", "cd", "ad"})
    return frozenset(_NAMES)


# ---------------------------------------------------------------------------
# Gauss-Legendre panel helpers
# ---------------------------------------------------------------------------

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _leggauss(m: int) -> tuple[np.ndarray, np.ndarray]:
    if m not in _GL_CACHE:
        _GL_CACHE[m] = np.polynomial.legendre.leggauss(m)
    return _GL_CACHE[m]


def _panel_nodes(boundaries, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on consecutive panels."""
    x, w = _leggauss(m)
    nodes, weights = [], []
    for lo, hi in zip(boundaries[:-1], boundaries[1:]):
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        nodes.append(mid + half * x)
        weights.append(half * w)
    return np.concatenate(nodes), np.concatenate(weights)


def _ive01(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """e^-t I_0(t) and e^-t I_1(t), stable for arbitrarily large t."""
    big = t > _ASYM_SWITCH
    ts = np.where(big, 1.0, t)
    i0 = np.asarray(sp.ive(0, ts), dtype=float)
    i1 = np.asarray(sp.ive(1, ts), dtype=float)
    if np.any(big):
        tb = t[big]
        pref = 1.0 / np.sqrt(2.0 * np.pi * tb)
        x8 = 1.0 / (8.0 * tb)
        i0[big] = pref * (1.0 + x8 + 4.5 * x8 * x8)
        i1[big] = pref * (1.0 - 3.0 * x8 - 7.5 * x8 * x8)
    return i0, i1


def _laplace_accumulate(n: int, z: float, t: np.ndarray, w: np.ndarray,
                        names) -> dict[str, float]:
    i0, i1 = _ive01(t)
    r = i1 / t  # == (ive0 - ive2)/2 by the Bessel recurrence
    ew = np.exp(z * t) * w
    i0nm1 = i0 ** (n - 1)
    stack = {
        "a": i0 ** n,
        "b": i1 * i0nm1,
        "c": (i0 - r) * i0nm1,
        "s": r * i0nm1,
    }
    if n >= 2:
        i0nm2 = i0 ** (n - 2)
        stack["d"] = i1 * i1 * i0nm2
        # difference forms keep the large-t cancellations mild
        stack["cd"] = ((i0 - i1) * (i0 + i1) - i0 * r) * i0nm2
        stack["ad"] = (i0 - i1) * (i0 + i1) * i0nm2
    return {k: float(np.dot(ew, stack[k])) for k in names}


def laplace_integrals(n: int, z: float, *, cutoff: float = 64.0,
                      nodes: int = 48) -> dict[str, float]:
    """Evaluate the torus integrals by the Laplace-Bessel representation.

    Parameters
    ----------
    n : int
        Lattice dimension, n >= 1.
    z : float
        Spectral parameter, z <= 0.
    cutoff : float
        Where the explicit t-panels stop at z = 0; beyond it the power-law
        tail is integrated exactly-in-form via the substitution u = 1/sqrt(t).
    nodes : int
        Gauss-Legendre nodes per panel.

    Returns
    -------
    dict
        Integral values keyed by name.  At z = 0 only the finite ones are
        present (see :func:`finite_at_threshold`).
    """
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if z > 0.0:
        raise ValueError(f"spectral parameter must be <= 0, got {z}")
    names = integral_names(n) if z < 0.0 else tuple(
        k for k in integral_names(n) if k in finite_at_threshold(n))

    # Panels double in length from the shortest integrand scale up to the
    # point where exp(z t) has underflowed (z < 0) or the power tail takes
    # over (z = 0).
    h = min(1.0, 1.0 / (n - z))
    t_end = 746.0 / (-z) if z < 0.0 else float(cutoff)
    bounds = [0.0, h]
    while bounds[-1] < t_end:
        bounds.append(min(t_end, bounds[-1] * 2.0))
    t, w = _panel_nodes(bounds, nodes)
    out = _laplace_accumulate(n, z, t, w, names)
    if z == 0.0:
        u, wu = _panel_nodes([0.0, t_end ** -0.5], 2 * nodes)
        tail = _laplace_accumulate(n, z, u ** -2.0, wu * 2.0 * u ** -3.0, names)
        for k in names:
            out[k] += tail[k]
    return out


# ---------------------------------------------------------------------------
# Tensor-product periodic trapezoidal rule
# ---------------------------------------------------------------------------

def required_grid_points(n: int, z: float, rtol: float) -> int:
    """Grid size per dimension for the trapezoidal rule to reach ``rtol``.

    The periodic trapezoidal error decays like exp(-M * y0) with
    y0 = arccosh(1 - z) the distance from the real axis to the nearest
    complex zero of E(p) - z.
    """
    if z >= 0.0:
        raise ValueError("trapezoid grid sizing requires z < 0")
    y0 = float(np.arccosh(1.0 - z))
    # log(1/-z) accounts for the growth of the integrand maximum near the
    # band edge; +7 is a flat safety margin.
    m = (np.log(1.0 / rtol) + max(0.0, np.log(1.0 / -z)) + 7.0) / y0
    return max(32, int(2 * np.ceil(m / 2.0)))


def _axis_nodes(m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Folded trapezoid nodes on [0, pi] with their multiplicities.

    All integrands are even in each coordinate, so the M-point periodic rule
    on (-pi, pi] collapses to M/2 + 1 nodes with weights (1, 2, ..., 2, 1).
    """
    u = np.linspace(0.0, np.pi, m // 2 + 1)
    wt = np.full(m // 2 + 1, 2.0)
    wt[0] = wt[-1] = 1.0
    return u, np.cos(u), wt


def trapezoid_integrals(n: int, z: float, grid_points: int) -> dict[str, float]:
    """Torus integrals for z < 0 by the periodic trapezoidal rule (n <= 3)."""
    if n not in (1, 2, 3):
        raise QuadratureError(
            f"tensor-trapezoid engine supports n <= 3, got n={n}; "
            "use the laplace-bessel method")
    if z >= 0.0:
        raise ValueError(f"trapezoid engine requires z < 0, got {z}")
    m = int(grid_points)
    if m % 2 or m < 4:
        raise ValueError(f"grid_points must be an even integer >= 4, got {m}")
    cap = _GRID_CAP[n]
    if m > cap:
        raise QuadratureError(
            f"requested grid {m}^{n} exceeds the cap {cap}^{n}; "
            "quadrature would not converge in reasonable time")
    u, cu, wt = _axis_nodes(m)
    s2 = np.sin(u) ** 2
    if n == 1:
        f = wt / ((1.0 - cu) - z)
        acc = {"a": f.sum(), "b": (f * cu).sum(), "c": (f * cu * cu).sum(),
               "s": (f * s2).sum()}
    elif n == 2:
        dnm = (1.0 - cu)[:, None] + (1.0 - cu)[None, :] - z
        f = (wt[:, None] * wt[None, :]) / dnm
        c1, c2 = cu[:, None], cu[None, :]
        acc = {
            "a": f.sum(),
            "b": (f * c1).sum(),
            "c": (f * c1 * c1).sum(),
            "d": (f * c1 * c2).sum(),
            "s": (f * s2[:, None]).sum(),
            "cd": 0.5 * (f * (c1 - c2) ** 2).sum(),
            "ad": (f * (1.0 - c1 * c2)).sum(),
        }
    else:
        acc = dict.fromkeys(_NAMES, 0.0)
        w23 = wt[:, None] * wt[None, :]
        e23 = (1.0 - cu)[:, None] + (1.0 - cu)[None, :]
        c2 = cu[:, None]
        # slice-by-slice over the first axis keeps memory at O(M^2) and the
        # summation order fixed
        for i in range(m // 2 + 1):
            f = (wt[i] * w23) / ((1.0 - cu[i]) + e23 - z)
            acc["a"] += f.sum()
            acc["b"] += (f * cu[i]).sum()
            acc["c"] += (f * cu[i] ** 2).sum()
            acc["d"] += (f * cu[i] * c2).sum()
            acc["s"] += (f * s2[i]).sum()
            acc["cd"] += 0.5 * (f * (cu[i] - c2) ** 2).sum()
            acc["ad"] += (f * (1.0 - cu[i] * c2)).sum()
    return {k: float(v) / m ** n for k, v in acc.items()}


def trapezoid_threshold(n: int, grid_points: int | None = None) -> dict[str, float]:
    """Threshold integrals s(0) (n <= 3) and c(0)-d(0) (n = 2, 3) by grid.

    The direct integrands are replaced by subtracted forms whose numerators
    vanish at p = 0 fast enough that the integrand extends continuously:
    ``sum_j sin^2 p_j / (n E)`` for s and ``(cos p_1 - cos p_2)^2 / (2 E)``
    for c - d.  The origin node is assigned the limiting value.
    """
    if n not in (1, 2, 3):
        raise QuadratureError(
            f"grid threshold quadrature supports n <= 3, got n={n}")
    m = grid_points if grid_points is not None else {1: 64, 2: 1024, 3: 256}[n]
    if m % 2 or m < 4:
        raise ValueError(f"grid_points must be an even integer >= 4, got {m}")
    u, cu, wt = _axis_nodes(m)
    s2 = np.sin(u) ** 2
    if n == 1:
        e = 1.0 - cu
        g = np.empty_like(e)
        g[1:] = s2[1:] / e[1:]
        g[0] = 2.0
        return {"s": float((wt * g).sum()) / m}
    if n == 2:
        e = (1.0 - cu)[:, None] + (1.0 - cu)[None, :]
        w = wt[:, None] * wt[None, :]
        num_cd = 0.5 * (cu[:, None] - cu[None, :]) ** 2
        num_s = 0.5 * (s2[:, None] + s2[None, :])
        gcd = np.divide(num_cd, e, out=np.zeros_like(e), where=e > 0)
        gs = np.divide(num_s, e, out=np.zeros_like(e), where=e > 0)
        gs[0, 0] = 1.0  # limit 2/n at the origin
        return {"cd": float((w * gcd).sum()) / m ** 2,
                "s": float((w * gs).sum()) / m ** 2}
    acc_cd = acc_s = 0.0
    w23 = wt[:, None] * wt[None, :]
    e23 = (1.0 - cu)[:, None] + (1.0 - cu)[None, :]
    ones = np.ones_like(e23)
    for i in range(m // 2 + 1):
        e = (1.0 - cu[i]) + e23
        num_cd = 0.5 * (cu[i] - cu[:, None]) ** 2 * ones
        num_s = (s2[i] + s2[:, None] + s2[None, :]) / 3.0
        gcd = np.divide(num_cd, e, out=np.zeros_like(e), where=e > 0)
        gs = np.divide(num_s, e, out=np.zeros_like(e), where=e > 0)
        if i == 0:
            gs[0, 0] = 2.0 / 3.0
        acc_cd += float((wt[i] * w23 * gcd).sum())
        acc_s += float((wt[i] * w23 * gs).sum())
    return {"cd": acc_cd / m ** 3, "s": acc_s / m ** 3}
