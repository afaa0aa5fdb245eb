"""Pure-Python reference kernels.

These are the single source of truth for the right-hand sides; the compiled
twins in _core.pyx must agree with them to rounding.  Layouts:

full state y (10):      rho0, B, B_S, B_N, G, G_N, G_S, G_R, Psi_flux, Omega
modulated state z (7):  Bbar, Bbar_S, Bbar_N, Gbar_S, Gbar_N, Omega, OmegaDot
scalar state w (4):     Omega, OmegaDot, phi, theta
"""

__all__ = ["rhs_full", "rhs_modulated", "rhs_exact_scalar", "BACKEND"]

BACKEND = "python"


def rhs_full(y, m, f, alpha, out):
    rho0 = y[0]
    B = y[1]
    B_S = y[2]
    B_N = y[3]
    G = y[4]
    G_N = y[5]
    G_S = y[6]
    G_R = y[7]
    Psi = y[8]
    Om = y[9]
    # eps2*m/(m-1) under the amplitude power law
    e2m = alpha * Om ** (2.0 * (m - 2.0))
    out[0] = -(m - 1.0) * rho0 * G
    out[1] = -(m * B * G + 4.0 * (B_N * G_N + B_S * G_S))
    out[2] = -(m * B_S * G + B * G_S - 2.0 * B_N * G_R)
    out[3] = -(m * B_N * G + B * G_N + 2.0 * B_S * G_R)
    out[4] = -(G * G / 2.0 + 2.0 * (G_N * G_N + G_S * G_S - G_R * G_R)
               - 2.0 * f * G_R + 2.0 * e2m * B)
    out[5] = -(G * G_N - f * G_S + 2.0 * e2m * B_N)
    out[6] = -(G * G_S + f * G_N + 2.0 * e2m * B_S)
    out[7] = -(G * G_R + f * G / 2.0)
    out[8] = (m - 1.0) * Psi * G
    out[9] = G * Om / 2.0
    return out


def rhs_modulated(z, m, f, alpha, c0, out):
    Bb = z[0]
    BbS = z[1]
    BbN = z[2]
    GbS = z[3]
    GbN = z[4]
    Om = z[5]
    Omd = z[6]
    Om2 = Om * Om
    e2m = alpha * Om ** (2.0 * (m - 2.0))
    out[0] = -4.0 * (BbN * GbN + BbS * GbS) / Om2
    out[1] = -f * BbN - (Bb * GbS - 2.0 * c0 * BbN) / Om2
    out[2] = f * BbS - (Bb * GbN + 2.0 * c0 * BbS) / Om2
    out[3] = -f * GbN - 2.0 * e2m * BbS / Om ** (2.0 * (m - 1.0))
    out[4] = f * GbS - 2.0 * e2m * BbN / Om ** (2.0 * (m - 1.0))
    out[5] = Omd
    out[6] = (-f * f * Om / 4.0 - (GbS * GbS + GbN * GbN - c0 * c0) / (Om2 * Om)
              - e2m * Bb / (Om ** (2.0 * (m - 2.0)) * Om2 * Om))
    return out


def rhs_exact_scalar(w, f, alpha, c0, cII, cIII, cIV, delta, out):
    Om = w[0]
    Omd = w[1]
    Om2 = Om * Om
    Om4 = Om2 * Om2
    out[0] = Omd
    out[1] = -f * f * Om / 4.0 + (c0 * c0 - cIII) / (Om2 * Om) - 2.0 * alpha * delta / (Om4 * Om)
    num = c0 * delta + cIV * Om2
    out[2] = f + (2.0 / Om2) * (delta * num / (delta * delta + 4.0 * cII * Om4) - c0)
    out[3] = f - (alpha / Om2) * num / (alpha * delta + cIII * Om2)
    return out
