# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of _warp_numpy.warp_affine (see that module for semantics)."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, floor, sin


def warp_affine(cnp.float32_t[:, :, ::1] img, int out_h, int out_w,
                double cx, double cy, double half_h, double half_w,
                double angle_rad):
    cdef int h = img.shape[0]
    cdef int w = img.shape[1]
    out_arr = np.empty((out_h, out_w, 3), dtype=np.float32)
    cdef cnp.float32_t[:, :, ::1] out = out_arr
    cdef double ca = cos(angle_rad)
    cdef double sa = sin(angle_rad)
    cdef double u, v, dx, dy, x, y, x0d, y0d
    cdef float fx, fy, one_fx, one_fy, top, bot
    cdef Py_ssize_t i, j, c, ix0, ix1, iy0, iy1

    with nogil:
        for i in range(out_h):
            v = ((<double>i + 0.5) / <double>out_h) * 2.0 - 1.0
            dy = v * half_h
            for j in range(out_w):
                u = ((<double>j + 0.5) / <double>out_w) * 2.0 - 1.0
                dx = u * half_w
                x = cx + ca * dx - sa * dy - 0.5
                y = cy + sa * dx + ca * dy - 0.5
                x0d = floor(x)
                y0d = floor(y)
                fx = <float>(x - x0d)
                fy = <float>(y - y0d)
                ix0 = <Py_ssize_t>x0d
                iy0 = <Py_ssize_t>y0d
                ix1 = ix0 + 1
                iy1 = iy0 + 1
                if ix0 < 0: ix0 = 0
                elif ix0 > w - 1: ix0 = w - 1
                if ix1 < 0: ix1 = 0
                elif ix1 > w - 1: ix1 = w - 1
                if iy0 < 0: iy0 = 0
                elif iy0 > h - 1: iy0 = h - 1
                if iy1 < 0: iy1 = 0
                elif iy1 > h - 1: iy1 = h - 1
                one_fx = <float>1.0 - fx
                one_fy = <float>1.0 - fy
                for c in range(3):
                    top = one_fx * img[iy0, ix0, c] + fx * img[iy0, ix1, c]
                    bot = one_fx * img[iy1, ix0, c] + fx * img[iy1, ix1, c]
                    out[i, j, c] = one_fy * top + fy * bot
    return out_arr
