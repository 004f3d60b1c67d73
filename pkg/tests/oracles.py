"""Independent reference computations used by the tests.

Nothing here imports the package under test.
"""

import math

import mpmath as mp
import numpy as np
import sympy as sp


def mobility_direct(delta, eta, beta, dps=50):
    """Mobility from the plain cos/sin/cosh/sinh BVP in extended precision."""
    with mp.workdps(dps):
        eta = mp.mpc(eta)
        a = mp.sqrt(beta) * mp.sqrt(eta) * mp.expjpi(mp.mpf(1) / 4)
        d = mp.mpf(delta)

        def rows(e):
            c, s, ch, sh = mp.cos(a * e), mp.sin(a * e), mp.cosh(a * e), mp.sinh(a * e)
            return (
                [c, s, ch, sh],
                [-a * s, a * c, a * sh, a * ch],
                [-(a**2) * c, -(a**2) * s, a**2 * ch, a**2 * sh],
                [a**3 * s, -(a**3) * c, a**3 * sh, a**3 * ch],
            )

        r0, rd = rows(0), rows(d)
        # z'''(0) = f1, z''(0) = -m1, -z'''(d) = f2, z''(d) = m2
        S = mp.matrix([r0[3], [-v for v in r0[2]], [-v for v in rd[3]], rd[2]])
        W = mp.matrix([r0[0], r0[1], rd[0], rd[1]])
        M = eta * (W * S**-1)
        return np.array([[complex(M[i, j]) for j in range(4)] for i in range(4)])


def rigid_body_residue(delta, beta):
    """Inverse inertia of a free rigid bar mapped to terminal velocities."""
    mass = beta**2 * delta
    inertia = beta**2 * delta**3 / 12
    # terminal velocities from centroid velocity V and spin W
    B = np.array([[1.0, -delta / 2], [0.0, 1.0], [1.0, delta / 2], [0.0, 1.0]])
    return B @ np.diag([1 / mass, 1 / inertia]) @ B.T


def fitted_laurent(mobility, delta, beta, h=None, npts=6):
    """K0, Kinf from a least-squares fit of eta*M(eta) as a polynomial in eta^2
    over real eta (finite-difference style extraction)."""
    if h is None:
        h = 0.15 / (beta * delta**2)
    etas = h * np.arange(1, npts + 1)
    V = np.vander(etas**2, npts, increasing=True)
    Y = np.array([(eta * mobility(delta, eta, beta)).real.ravel() for eta in etas])
    coef = np.linalg.solve(V, Y)
    return coef[0].reshape(4, 4), coef[1].reshape(4, 4)


def symbolic_inertia_relief():
    """Exact eta-coefficient of the element mobility by polynomial perturbation.

    zeta = z_rigid / a^4 + z0 + O(a^4) with z0'''' = z_rigid, free-end action
    conditions on z0, and orthogonality of z0 to the rigid modes.
    """
    e, d = sp.symbols("epsilon delta", positive=True)
    f1, m1, f2, m2 = sp.symbols("f1 m1 f2 m2")
    c0, c1, b0, b1, b2, b3 = sp.symbols("c0 c1 b0 b1 b2 b3")
    rigid = c0 + c1 * e
    z0 = b0 + b1 * e + b2 * e**2 + b3 * e**3 + c0 * e**4 / 24 + c1 * e**5 / 120
    eqs = [
        sp.diff(z0, e, 3).subs(e, 0) - f1,
        sp.diff(z0, e, 2).subs(e, 0) + m1,
        -sp.diff(z0, e, 3).subs(e, d) - f2,
        sp.diff(z0, e, 2).subs(e, d) - m2,
        sp.integrate(z0, (e, 0, d)),
        sp.integrate(e * z0, (e, 0, d)),
    ]
    sol = sp.solve(eqs, [c0, c1, b0, b1, b2, b3], dict=True)[0]
    z = z0.subs(sol)
    disp = [z.subs(e, 0), sp.diff(z, e).subs(e, 0), z.subs(e, d), sp.diff(z, e).subs(e, d)]
    K = sp.Matrix(4, 4, lambda i, j: sp.expand(sp.diff(disp[i], [f1, m1, f2, m2][j])))
    return d, K


def beat_energy_mech(m, beta, rho, u0, tau):
    """Mechanical energy of the gyroscopic pair from its exact eigen-solution."""
    g = rho * (m * math.pi) ** 2 / beta**2
    w0 = (m * math.pi) ** 2 / beta
    s = math.sqrt(g * g / 4 + w0 * w0)
    tau = np.asarray(tau, dtype=float)
    c, dd = np.cos(s * tau), g / (2 * s) * np.sin(s * tau)
    cd, ddd = -s * np.sin(s * tau), g / 2 * np.cos(s * tau)
    ch, sh = np.cos(g * tau / 2), np.sin(g * tau / 2)
    u = u0 * (c * ch + dd * sh)
    ud = u0 * (cd * ch - c * g / 2 * sh + ddd * sh + dd * g / 2 * ch)
    return 0.5 * beta**2 * ud**2 + 0.5 * (m * math.pi) ** 4 * u**2
