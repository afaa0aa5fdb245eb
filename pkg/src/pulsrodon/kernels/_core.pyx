# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twins of the reference kernels in _ref.py.

Same signatures, same component layouts; see _ref.py for the layout table.
"""

from libc.math cimport pow

BACKEND = "cython"


cpdef rhs_full(const double[::1] y, double m, double f, double alpha,
               double[::1] out):
    cdef double rho0 = y[0]
    cdef double B = y[1]
    cdef double B_S = y[2]
    cdef double B_N = y[3]
    cdef double G = y[4]
    cdef double G_N = y[5]
    cdef double G_S = y[6]
    cdef double G_R = y[7]
    cdef double Psi = y[8]
    cdef double Om = y[9]
    cdef double e2m = alpha * pow(Om, 2.0 * (m - 2.0))
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


cpdef rhs_modulated(const double[::1] z, double m, double f, double alpha,
                    double c0, double[::1] out):
    cdef double Bb = z[0]
    cdef double BbS = z[1]
    cdef double BbN = z[2]
    cdef double GbS = z[3]
    cdef double GbN = z[4]
    cdef double Om = z[5]
    cdef double Omd = z[6]
    cdef double Om2 = Om * Om
    cdef double e2m = alpha * pow(Om, 2.0 * (m - 2.0))
    out[0] = -4.0 * (BbN * GbN + BbS * GbS) / Om2
    out[1] = -f * BbN - (Bb * GbS - 2.0 * c0 * BbN) / Om2
    out[2] = f * BbS - (Bb * GbN + 2.0 * c0 * BbS) / Om2
    out[3] = -f * GbN - 2.0 * e2m * BbS / pow(Om, 2.0 * (m - 1.0))
    out[4] = f * GbS - 2.0 * e2m * BbN / pow(Om, 2.0 * (m - 1.0))
    out[5] = Omd
    out[6] = (-f * f * Om / 4.0 - (GbS * GbS + GbN * GbN - c0 * c0) / (Om2 * Om)
              - e2m * Bb / (pow(Om, 2.0 * (m - 2.0)) * Om2 * Om))
    return out


cpdef rhs_exact_scalar(const double[::1] w, double f, double alpha, double c0,
                       double cII, double cIII, double cIV, double delta,
                       double[::1] out):
    cdef double Om = w[0]
    cdef double Omd = w[1]
    cdef double Om2 = Om * Om
    cdef double Om4 = Om2 * Om2
    cdef double num = c0 * delta + cIV * Om2
    out[0] = Omd
    out[1] = -f * f * Om / 4.0 + (c0 * c0 - cIII) / (Om2 * Om) - 2.0 * alpha * delta / (Om4 * Om)
    out[2] = f + (2.0 / Om2) * (delta * num / (delta * delta + 4.0 * cII * Om4) - c0)
    out[3] = f - (alpha / Om2) * num / (alpha * delta + cIII * Om2)
    return out
