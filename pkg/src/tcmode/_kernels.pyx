# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loop: sum of amplitude * sin^2(omega * t) over many terms.

Each output point is a Kahan-compensated sum evaluated in strict term
order, so results are bit-identical no matter how callers slice the time
grid across threads.  Releases the GIL.
"""

from libc.math cimport sin


def eval_sin2_sum(const double[::1] omegas, const double[::1] amps,
                  const double[::1] times, double[::1] out):
    cdef Py_ssize_t nterms = omegas.shape[0]
    cdef Py_ssize_t ntimes = times.shape[0]
    cdef Py_ssize_t i, k
    cdef double t, acc, comp, x, y, tmp
    if amps.shape[0] != nterms or out.shape[0] != ntimes:
        raise ValueError("mismatched kernel array lengths")
    with nogil:
        for i in range(ntimes):
            t = times[i]
            acc = 0.0
            comp = 0.0
            for k in range(nterms):
                x = sin(omegas[k] * t)
                y = amps[k] * x * x - comp
                tmp = acc + y
                comp = (tmp - acc) - y
                acc = tmp
            out[i] = acc
