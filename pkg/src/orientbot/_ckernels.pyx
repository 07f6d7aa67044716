# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; same contracts and accumulation order as ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport ceil, floor

cnp.import_array()

BACKEND = "cython"


def im2col(double[:, :, :, ::1] xpad, int k, int stride, int oh, int ow):
    cdef Py_ssize_t n = xpad.shape[0], c = xpad.shape[3]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n * oh * ow, k * k * c))
    cdef double[:, ::1] cols = out
    cdef Py_ssize_t b, oy, ox, ky, kx, ch, row, base
    for b in range(n):
        for oy in range(oh):
            for ox in range(ow):
                row = (b * oh + oy) * ow + ox
                for ky in range(k):
                    for kx in range(k):
                        base = (ky * k + kx) * c
                        for ch in range(c):
                            cols[row, base + ch] = xpad[b, oy * stride + ky, ox * stride + kx, ch]
    return out


def col2im(dcols_in, int n, int hp, int wp, int c, int k, int stride, int oh, int ow):
    cdef double[:, ::1] dcols = np.ascontiguousarray(dcols_in, dtype=np.float64).reshape(
        n * oh * ow, k * k * c)
    cdef cnp.ndarray[cnp.float64_t, ndim=4] out = np.zeros((n, hp, wp, c))
    cdef double[:, :, :, ::1] dx = out
    cdef Py_ssize_t b, oy, ox, ky, kx, ch, row, base
    # (ky, kx) outermost so every element accumulates in the fallback's order
    for ky in range(k):
        for kx in range(k):
            base = (ky * k + kx) * c
            for b in range(n):
                for oy in range(oh):
                    for ox in range(ow):
                        row = (b * oh + oy) * ow + ox
                        for ch in range(c):
                            dx[b, oy * stride + ky, ox * stride + kx, ch] += dcols[row, base + ch]
    return out


def channel_window_sum(a_in, int half):
    a_arr = np.ascontiguousarray(a_in, dtype=np.float64)
    shape = a_arr.shape
    cdef Py_ssize_t c = shape[len(shape) - 1]
    cdef double[:, ::1] a = a_arr.reshape(-1, c)
    cdef Py_ssize_t m = a.shape[0]
    out_arr = np.empty((m, c))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, ch, j, lo, hi
    cdef double s
    for i in range(m):
        for ch in range(c):
            lo = ch - half
            if lo < 0:
                lo = 0
            hi = ch + half
            if hi > c - 1:
                hi = c - 1
            s = 0.0
            for j in range(lo, hi + 1):
                s += a[i, j]
            out[i, ch] = s
    return out_arr.reshape(shape)


cdef int[8] DR = [-1, -1, -1, 0, 0, 1, 1, 1]
cdef int[8] DC = [-1, 0, 1, -1, 1, -1, 0, 1]


def bfs_distances(occupied, int start_row, int start_col):
    cdef cnp.uint8_t[:, ::1] occ = np.ascontiguousarray(occupied, dtype=np.uint8)
    cdef int h = occ.shape[0], w = occ.shape[1]
    dist_arr = np.full((h, w), -1, dtype=np.int32)
    cdef int[:, ::1] dist = dist_arr
    if occ[start_row, start_col]:
        return dist_arr
    queue_arr = np.empty(h * w, dtype=np.int32)
    cdef int[::1] queue = queue_arr
    cdef Py_ssize_t head = 0, tail = 0
    cdef int r, c, rr, cc, dr, dc, d, q
    dist[start_row, start_col] = 0
    queue[tail] = start_row * w + start_col
    tail += 1
    while head < tail:
        r = queue[head] // w
        c = queue[head] % w
        head += 1
        d = dist[r, c] + 1
        for q in range(8):
            dr = DR[q]
            dc = DC[q]
            rr = r + dr
            cc = c + dc
            if rr < 0 or rr >= h or cc < 0 or cc >= w:
                continue
            if occ[rr, cc] or dist[rr, cc] >= 0:
                continue
            if dr != 0 and dc != 0 and (occ[r + dr, c] or occ[r, c + dc]):
                continue
            dist[rr, cc] = d
            queue[tail] = rr * w + cc
            tail += 1
    return dist_arr


def supercover(double x0, double y0, double x1, double y1):
    cells = []
    cdef double xmin = x0 if x0 < x1 else x1
    cdef double xmax = x1 if x0 < x1 else x0
    cdef double dx = x1 - x0, xa, xb, ya, yb, lo, hi
    cdef long col, row
    for col in range(<long>ceil(xmin) - 1, <long>floor(xmax) + 1):
        if dx == 0.0:
            ya = y0
            yb = y1
        else:
            xa = xmin if xmin > col else <double>col
            xb = xmax if xmax < col + 1 else <double>(col + 1)
            ya = y0 + (xa - x0) * (y1 - y0) / dx
            yb = y0 + (xb - x0) * (y1 - y0) / dx
        lo = ya if ya < yb else yb
        hi = yb if ya < yb else ya
        for row in range(<long>ceil(lo) - 1, <long>floor(hi) + 1):
            cells.append((col, row))
    return cells


def segment_blocked(occupied, double x0, double y0, double x1, double y1):
    cdef cnp.uint8_t[:, ::1] occ = np.ascontiguousarray(occupied, dtype=np.uint8)
    cdef long h = occ.shape[0], w = occ.shape[1]
    cdef double xmin = x0 if x0 < x1 else x1
    cdef double xmax = x1 if x0 < x1 else x0
    cdef double dx = x1 - x0, xa, xb, ya, yb, lo, hi
    cdef long col, row
    for col in range(<long>ceil(xmin) - 1, <long>floor(xmax) + 1):
        if dx == 0.0:
            ya = y0
            yb = y1
        else:
            xa = xmin if xmin > col else <double>col
            xb = xmax if xmax < col + 1 else <double>(col + 1)
            ya = y0 + (xa - x0) * (y1 - y0) / dx
            yb = y0 + (xb - x0) * (y1 - y0) / dx
        lo = ya if ya < yb else yb
        hi = yb if ya < yb else ya
        if col < 0 or col >= w:
            continue
        for row in range(<long>ceil(lo) - 1, <long>floor(hi) + 1):
            if 0 <= row < h and occ[row, col]:
                return True
    return False
