"""Reference computations that share no numerics with the package.

Only ``numpy``/``scipy`` primitives are used here: the slit polynomial is
rebuilt from its roots, integrals go through QUADPACK, and zero counting runs
on a uniform grid of cells.
"""
from __future__ import annotations

import numpy as np
from scipy import integrate, optimize


def abs_poly(roots, x):
    """``|prod (x - r)|`` for real ``x``."""
    return abs(float(np.prod([x - r for r in roots])))


def gk_weighted(roots, lo, hi, numerator, epsabs=1e-13, epsrel=1e-13):
    """``int_lo^hi numerator(x) / sqrt|p(x)| dx`` by adaptive Gauss-Kronrod.

    The interval is split at its midpoint and each half is mapped with
    ``x = end +- u^2`` so that the inverse square-root endpoint singularity
    becomes a smooth integrand.
    """
    mid = 0.5 * (lo + hi)

    def left(u):
        x = lo + u * u
        return 2 * u * numerator(x) / np.sqrt(abs_poly(roots, x))

    def right(u):
        x = hi - u * u
        return 2 * u * numerator(x) / np.sqrt(abs_poly(roots, x))

    def q(fun, top):
        re = integrate.quad(lambda u: np.real(fun(u)), 0, top, epsabs=epsabs, epsrel=epsrel,
                            limit=400)[0]
        im = integrate.quad(lambda u: np.imag(fun(u)), 0, top, epsabs=epsabs, epsrel=epsrel,
                            limit=400)[0]
        return complex(re, im)

    return q(left, np.sqrt(mid - lo)) + q(right, np.sqrt(hi - mid))


def complex_step_derivative(fun, z, h=1e-5):
    """Fourth-order central difference of an analytic ``fun`` along the real direction."""
    return (-fun(z + 2 * h) + 8 * fun(z + h) - 8 * fun(z - h) + fun(z - 2 * h)) / (12 * h)


def n1_eta_zeros(m_minus, m_plus):
    """Zeros of ``m_- sqrt(z^2 - 1) + m_+ z`` with ``sqrt(z^2-1) = sqrt(z-1) sqrt(z+1)``.

    Squaring gives ``z^2 = m_-^2 / (m_-^2 - m_+^2)``; candidates that solve the
    unsquared equation on the principal product branch are kept.
    """
    den = m_minus ** 2 - m_plus ** 2
    if den == 0:
        return []
    z0 = np.sqrt(complex(m_minus ** 2 / den))
    out = []
    for z in (z0, -z0):
        f = np.sqrt(z - 1) * np.sqrt(z + 1)
        if abs(m_minus * f + m_plus * z) < 1e-9 * (abs(m_minus * f) + abs(m_plus * z)):
            if not (abs(z.imag) < 1e-14 and -1 <= z.real <= 1):
                out.append(complex(z))
    return out


def grid_winding_zeros(eta, box, cells, upper_lower=True, per_edge=48):
    """Zeros of ``eta(z, side)`` in ``box = (x0, x1, y0, y1)`` by per-cell winding.

    The row boundary ``y = 0`` is always a grid line; cells above it evaluate
    their bottom edge with ``side=+1`` and cells below with ``side=-1``, so no
    cell straddles a slit. Returns the list of cells (centre, winding) with
    nonzero winding.
    """
    x0, x1, y0, y1 = box
    nx, ny = cells
    xs = np.linspace(x0, x1, nx + 1)
    ys_up = np.linspace(0.0, y1, ny // 2 + 1)
    ys_dn = np.linspace(y0, 0.0, ny // 2 + 1)
    t = np.linspace(0.0, 1.0, per_edge, endpoint=False)
    found = []
    for ys, side in ((ys_up, 1), (ys_dn, -1)):
        for i in range(nx):
            for j in range(len(ys) - 1):
                a, b, c, d = xs[i], xs[i + 1], ys[j], ys[j + 1]
                corners = [complex(a, c), complex(b, c), complex(b, d), complex(a, d)]
                path = np.concatenate([p + (q - p) * t for p, q in
                                       zip(corners, corners[1:] + corners[:1])])
                on_axis = np.abs(path.imag) == 0.0
                vals = np.where(on_axis, eta(path, side), eta(path, 0))
                ph = np.unwrap(np.angle(np.append(vals, vals[0])))
                w = int(round((ph[-1] - ph[0]) / (2 * np.pi)))
                if w:
                    found.append((complex(0.5 * (a + b), 0.5 * (c + d)), w))
    return found


def refine_zero(eta, eta_prime, z0):
    """Newton polish with scipy on the principal sheet (off the cut)."""
    return complex(optimize.newton(lambda z: eta(z, 0), z0, fprime=lambda z: eta_prime(z, 0),
                                   tol=1e-14, maxiter=100))


def laurent_leading(fun, centre, radii=(1e-3, 2e-3, 3e-3), angles=(0.4, 1.9, 3.3, 5.0), order=5):
    """Least-squares Taylor fit of ``fun`` around ``centre``; returns the constant term."""
    pts = np.array([centre + r * np.exp(1j * a) for r in radii for a in angles])
    d = pts - centre
    V = np.vander(d, order, increasing=True)
    coef, *_ = np.linalg.lstsq(V, fun(pts), rcond=None)
    return complex(coef[0])


def principal_axes(points):
    """Semi-axis lengths (descending) and major-axis angle of a sampled ellipse.

    Assumes the samples are uniform in the ellipse's angular parameter, which
    holds for the single-cavity trace with cosine-spaced slit parameter.
    """
    xy = np.column_stack([points.real, points.imag])
    xy = xy - xy.mean(axis=0)
    cov = xy.T @ xy / len(xy)
    w, v = np.linalg.eigh(cov)
    # a cos t has mean square a^2 / 2
    return np.sqrt(2 * w[::-1]), float(np.arctan2(v[1, -1], v[0, -1]))
