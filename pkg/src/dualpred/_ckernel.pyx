# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled whole-trace dual-prediction loop.

Mirrors ``dualpred._pykernel.dual_run`` operation for operation. Both
predictors keep their own window; neither reads the other's state.
"""

from libc.math cimport NAN, fabs
from libc.string cimport memmove

import numpy as np


cdef inline double _predict(const double* w, Py_ssize_t m,
                            double kp, double ki, double kd) noexcept nogil:
    cdef double total = 0.0
    cdef Py_ssize_t i
    for i in range(m):
        total += w[i]
    cdef double newest = w[m - 1]
    cdef double term_p = kp * newest
    cdef double term_i = ki * (total / <double>m)
    cdef double term_d = kd * (newest - w[m - 2])
    return (term_p + term_i) + term_d


cdef inline void _push(double* w, Py_ssize_t m, Py_ssize_t* fill, double value) noexcept nogil:
    if fill[0] < m:
        w[fill[0]] = value
        fill[0] += 1
    else:
        memmove(w, w + 1, (m - 1) * sizeof(double))
        w[m - 1] = value


def dual_run(const double[::1] samples, double kp, double ki, double kd,
             Py_ssize_t m, double eps):
    """Return ``(prediction, transmitted, y_sensor, y_base, mismatch)``.

    ``mismatch`` is the first step where the two records differ, or -1.
    """
    cdef Py_ssize_t n = samples.shape[0]
    prediction_arr = np.empty(n, dtype=np.float64)
    transmitted_arr = np.empty(n, dtype=np.uint8)
    y_sensor_arr = np.empty(n, dtype=np.float64)
    y_base_arr = np.empty(n, dtype=np.float64)
    sensor_w_arr = np.zeros(m, dtype=np.float64)
    base_w_arr = np.zeros(m, dtype=np.float64)

    cdef double[::1] prediction = prediction_arr
    cdef unsigned char[::1] transmitted = transmitted_arr
    cdef double[::1] y_sensor = y_sensor_arr
    cdef double[::1] y_base = y_base_arr
    cdef double[::1] sensor_w = sensor_w_arr
    cdef double[::1] base_w = base_w_arr

    cdef Py_ssize_t sensor_fill = 0
    cdef Py_ssize_t base_fill = 0
    cdef Py_ssize_t k
    cdef Py_ssize_t mismatch = -1
    cdef double x, estimate, ys, yb
    cdef bint send

    with nogil:
        for k in range(n):
            x = samples[k]
            # sensor side
            if sensor_fill < m:
                estimate = NAN
                send = True
                ys = x
            else:
                estimate = _predict(&sensor_w[0], m, kp, ki, kd)
                send = fabs(x - estimate) > eps
                ys = x if send else estimate
            _push(&sensor_w[0], m, &sensor_fill, ys)
            prediction[k] = estimate
            transmitted[k] = send
            y_sensor[k] = ys

            # base station side: sees only the optional transmitted value
            if send:
                yb = x
            elif base_fill < m:
                mismatch = k
                break
            else:
                yb = _predict(&base_w[0], m, kp, ki, kd)
            _push(&base_w[0], m, &base_fill, yb)
            y_base[k] = yb

            if ys != yb:
                mismatch = k
                break

    return prediction_arr, transmitted_arr, y_sensor_arr, y_base_arr, mismatch
