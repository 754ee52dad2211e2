"""Compiled point kernels for the integrator hot path.

A superposition is packed as the tuple ``(r, dm, de, cc, sc, geo)``:

    r        complex weights relative to the carrier term
    dm, de   azimuthal number and energy offsets from the carrier term
    cc, sc   cos / sin Fourier coefficients per term, indexed by mode k
    geo      [kind (0 torus, 1 flat), a, R, carrier m, |carrier weight|^2]

so that Psi = carrier * b with carrier = c0 exp(i (m0 phi - E0 t)) and

    b(theta, phi, t) = sum_j r_j exp(i (dm_j phi - de_j t)) f_j(theta).
"""

import numpy as np
from numba import njit

TORUS = 0.0
FLAT = 1.0


@njit(cache=True)
def envelope_jet(theta, phi, t, r, dm, de, cc, sc):
    """b and its first and second partials in (theta, phi)."""
    c1 = np.cos(theta)
    s1 = np.sin(theta)
    b = 0j
    bt = 0j
    bp = 0j
    btt = 0j
    btp = 0j
    bpp = 0j
    nk = cc.shape[1]
    for j in range(r.shape[0]):
        f = 0.0
        df = 0.0
        ddf = 0.0
        ck = 1.0
        sk = 0.0
        for k in range(nk):
            ac = cc[j, k]
            asn = sc[j, k]
            val = ac * ck + asn * sk
            f += val
            df += k * (asn * ck - ac * sk)
            ddf -= k * k * val
            ck, sk = ck * c1 - sk * s1, sk * c1 + ck * s1
        e = r[j] * np.exp(1j * (dm[j] * phi - de[j] * t))
        im = 1j * dm[j]
        b += e * f
        bt += e * df
        btt += e * ddf
        ep = im * e
        bp += ep * f
        btp += ep * df
        bpp += im * ep * f
    return b, bt, bp, btt, btp, bpp


@njit(cache=True)
def envelope_jet_many(theta, phi, t, r, dm, de, cc, sc):
    n = theta.shape[0]
    out = np.empty((6, n), dtype=np.complex128)
    for i in range(n):
        jet = envelope_jet(theta[i], phi[i], t[i], r, dm, de, cc, sc)
        for q in range(6):
            out[q, i] = jet[q]
    return out


@njit(cache=True)
def _azimuthal_scale(theta, geo):
    # sqrt(g_phi_phi)
    if geo[0] == TORUS:
        return geo[2] + geo[1] * np.cos(theta)
    return geo[2]


@njit(cache=True)
def density(theta, phi, t, pk):
    r, dm, de, cc, sc, geo = pk
    b = envelope_jet(theta, phi, t, r, dm, de, cc, sc)[0]
    return geo[4] * (b.real * b.real + b.imag * b.imag)


@njit(cache=True)
def velocity(theta, phi, t, pk):
    r, dm, de, cc, sc, geo = pk
    b, bt, bp, btt, btp, bpp = envelope_jet(theta, phi, t, r, dm, de, cc, sc)
    h = _azimuthal_scale(theta, geo)
    a = geo[1]
    return (bt / b).imag / (a * a), (geo[3] + (bp / b).imag) / (h * h)


@njit(cache=True)
def rhs_trajectory(t, y, pk):
    out = np.empty(2)
    out[0], out[1] = velocity(y[0], y[1], t, pk)
    return out


@njit(cache=True)
def stability_matrix(theta, phi, t, pk):
    """Velocity and metric-scaled phase Hessian J at one point."""
    r, dm, de, cc, sc, geo = pk
    b, bt, bp, btt, btp, bpp = envelope_jet(theta, phi, t, r, dm, de, cc, sc)
    lt = bt / b
    lp = bp / b
    s_tt = (btt / b - lt * lt).imag
    s_tp = (btp / b - lt * lp).imag
    s_pp = (bpp / b - lp * lp).imag
    a = geo[1]
    h = _azimuthal_scale(theta, geo)
    vt = lt.imag / (a * a)
    vp = (geo[3] + lp.imag) / (h * h)
    return vt, vp, s_tt / (a * a), s_tp / (a * h), s_pp / (h * h)


@njit(cache=True)
def rhs_monodromy(t, y, pk):
    """(theta, phi, M11, M12, M21, M22) with dM/dt = J M."""
    vt, vp, j11, j12, j22 = stability_matrix(y[0], y[1], t, pk)
    out = np.empty(6)
    out[0] = vt
    out[1] = vp
    out[2] = j11 * y[2] + j12 * y[4]
    out[3] = j11 * y[3] + j12 * y[5]
    out[4] = j12 * y[2] + j22 * y[4]
    out[5] = j12 * y[3] + j22 * y[5]
    return out


@njit(cache=True)
def rhs_pair(t, y, pk):
    out = np.empty(4)
    out[0], out[1] = velocity(y[0], y[1], t, pk)
    out[2], out[3] = velocity(y[2], y[3], t, pk)
    return out


@njit(cache=True)
def trace_j(theta, phi, t, pk):
    vt, vp, j11, j12, j22 = stability_matrix(theta, phi, t, pk)
    return j11 + j22
