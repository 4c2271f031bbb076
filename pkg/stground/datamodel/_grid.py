"""Row-major token grid geometry: cell (r, c) sits at index r*side + c."""

import math

import numpy as np

from ..exceptions import DimMismatchError


def grid_side(num_cells):
    side = math.isqrt(int(num_cells))
    if side*side != num_cells or side < 1:
        raise DimMismatchError(num_cells, 'perfect square', 'grid cell count')
    return side


def cell_index(row, col, side):
    return row*side + col


def cell_center(index, side, width, height):
    row, col = divmod(int(index), side)
    return ((col + 0.5)*width/side, (row + 0.5)*height/side)


def cell_centers(num_cells, width, height):
    side = grid_side(num_cells)
    rows, cols = np.divmod(np.arange(num_cells), side)
    return (cols + 0.5)*width/side, (rows + 0.5)*height/side


def rasterize_box(box, num_cells, width, height):
    """Cells whose center lies inside the closed box."""
    x0, y0, x1, y1 = box
    xs, ys = cell_centers(num_cells, width, height)
    return (xs >= x0) & (xs <= x1) & (ys >= y0) & (ys <= y1)


def cells_box(cells, side, width, height):
    """Pixel box covering the given cells exactly."""
    rows, cols = np.divmod(np.asarray(sorted(cells)), side)
    return [
        float(cols.min()*width/side), float(rows.min()*height/side),
        float((cols.max() + 1)*width/side), float((rows.max() + 1)*height/side),
    ]


def point_in_box(point, box):
    x, y = point
    x0, y0, x1, y1 = box
    return x0 <= x <= x1 and y0 <= y <= y1


def box_area(box):
    x0, y0, x1, y1 = box
    return max(0.0, x1 - x0)*max(0.0, y1 - y0)


def upsample_bilinear(heatmap, width, height):
    """
    Upsamples a side x side grid to height x width pixels.

    Pixel centers are mapped onto cell-center coordinates and clamped at the
    border, so each cell center keeps its own value.
    """

    side = grid_side(len(heatmap))
    grid = np.asarray(heatmap, dtype=np.float64).reshape(side, side)

    def axis(n):
        coords = np.clip((np.arange(n) + 0.5)*side/n - 0.5, 0, side - 1)
        lo = np.floor(coords).astype(int)
        hi = np.minimum(lo + 1, side - 1)
        return lo, hi, coords - lo

    y_lo, y_hi, wy = axis(int(height))
    x_lo, x_hi, wx = axis(int(width))
    top = grid[y_lo][:, x_lo]*(1 - wx) + grid[y_lo][:, x_hi]*wx
    bottom = grid[y_hi][:, x_lo]*(1 - wx) + grid[y_hi][:, x_hi]*wx
    return top*(1 - wy)[:, None] + bottom*wy[:, None]


def argmax_point(heatmap, width, height):
    """Pixel center of the upsampled maximum; ties go to the smallest (row, col)."""
    up = upsample_bilinear(heatmap, width, height)
    y, x = np.unravel_index(int(np.argmax(up)), up.shape)
    return (float(x) + 0.5, float(y) + 0.5)
