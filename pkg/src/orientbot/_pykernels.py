"""Pure-Python/numpy reference kernels.

These are the fallback used when the compiled ``_ckernels`` extension is not
available. Accumulation order matches the compiled versions so that both
backends produce the same floating point results.
"""
from collections import deque

import numpy as np

BACKEND = "python"

# 8-neighbourhood, fixed order so BFS results are deterministic
NEIGHBOURS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


def im2col(xpad, k, stride, oh, ow):
    """(N, Hp, Wp, C) padded input -> (N*oh*ow, k*k*C) patch matrix."""
    n, _, _, c = xpad.shape
    cols = np.empty((n, oh, ow, k, k, c), dtype=np.float64)
    for ky in range(k):
        for kx in range(k):
            cols[:, :, :, ky, kx, :] = xpad[:, ky:ky + stride * (oh - 1) + 1:stride,
                                            kx:kx + stride * (ow - 1) + 1:stride, :]
    return cols.reshape(n * oh * ow, k * k * c)


def col2im(dcols, n, hp, wp, c, k, stride, oh, ow):
    """Adjoint of :func:`im2col`: scatter-add patch gradients back to the padded input."""
    dcols = dcols.reshape(n, oh, ow, k, k, c)
    dx = np.zeros((n, hp, wp, c), dtype=np.float64)
    for ky in range(k):
        for kx in range(k):
            dx[:, ky:ky + stride * (oh - 1) + 1:stride,
               kx:kx + stride * (ow - 1) + 1:stride, :] += dcols[:, :, :, ky, kx, :]
    return dx


def channel_window_sum(a, half):
    """Sum over the channel window [c - half, c + half], clipped at the ends."""
    c = a.shape[-1]
    acc = np.zeros_like(a)
    for d in range(-half, half + 1):
        lo, hi = max(0, -d), min(c, c - d)
        if lo < hi:
            acc[..., lo:hi] += a[..., lo + d:hi + d]
    return acc


def bfs_distances(occupied, start_row, start_col):
    """8-connected BFS step counts from a start cell; -1 where unreachable.

    A diagonal move is allowed only when both orthogonal cells it cuts past are
    free, so paths never squeeze between two diagonally touching obstacles.
    """
    occ = np.asarray(occupied, dtype=bool)
    h, w = occ.shape
    dist = np.full((h, w), -1, dtype=np.int32)
    if occ[start_row, start_col]:
        return dist
    dist[start_row, start_col] = 0
    queue = deque([(start_row, start_col)])
    while queue:
        r, c = queue.popleft()
        d = dist[r, c] + 1
        for dr, dc in NEIGHBOURS:
            rr, cc = r + dr, c + dc
            if rr < 0 or rr >= h or cc < 0 or cc >= w:
                continue
            if occ[rr, cc] or dist[rr, cc] >= 0:
                continue
            if dr and dc and (occ[r + dr, c] or occ[r, c + dc]):
                continue
            dist[rr, cc] = d
            queue.append((rr, cc))
    return dist


def supercover(x0, y0, x1, y1):
    """Cells (col, row) whose closed unit square meets the segment, in cell units.

    Closed squares mean a segment passing exactly through a grid corner
    touches all four cells sharing that corner.
    """
    cells = []
    xmin, xmax = min(x0, x1), max(x0, x1)
    dx = x1 - x0
    for col in range(int(np.ceil(xmin)) - 1, int(np.floor(xmax)) + 1):
        if dx == 0.0:
            ya, yb = y0, y1
        else:
            xa = max(xmin, float(col))
            xb = min(xmax, float(col + 1))
            ya = y0 + (xa - x0) * (y1 - y0) / dx
            yb = y0 + (xb - x0) * (y1 - y0) / dx
        lo, hi = min(ya, yb), max(ya, yb)
        for row in range(int(np.ceil(lo)) - 1, int(np.floor(hi)) + 1):
            cells.append((col, row))
    return cells


def segment_blocked(occupied, x0, y0, x1, y1):
    """True if any in-bounds supercover cell of the segment is occupied."""
    h, w = occupied.shape
    for col, row in supercover(x0, y0, x1, y1):
        if 0 <= row < h and 0 <= col < w and occupied[row, col]:
            return True
    return False
