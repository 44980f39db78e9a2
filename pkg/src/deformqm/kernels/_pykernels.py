"""Numpy implementations of the hot kernels.

Used when the compiled extension is unavailable, or when ``DEFORMQM_PURE``
is set. Results agree with the Cython versions to rounding.
"""

import numpy as np

# rows of the (m, n) phase matrix built per chunk; bounds peak memory
_CHUNK = 256


def direct_fourier_sum(nodes, values, freqs, sign):
    """Evaluate ``out[k] = sum_j values[j] * exp(sign * 1j * freqs[k] * nodes[j])``."""
    nodes = np.ascontiguousarray(nodes, dtype=np.float64)
    values = np.ascontiguousarray(values, dtype=np.complex128)
    freqs = np.ascontiguousarray(freqs, dtype=np.float64)
    out = np.empty(freqs.size, dtype=np.complex128)
    s = 1.0 if sign > 0 else -1.0
    for start in range(0, freqs.size, _CHUNK):
        block = freqs[start:start + _CHUNK]
        phase = np.exp((1j * s) * np.outer(block, nodes))
        out[start:start + _CHUNK] = phase @ values
    return out


def fd_weights(z, x, m):
    """Fornberg finite-difference weights.

    Parameters
    ----------
    z : float
        Evaluation point.
    x : (k,) array_like
        Stencil nodes (distinct, any order).
    m : int
        Highest derivative order.

    Returns
    -------
    c : (k, m + 1) ndarray
        ``c[j, d]`` is the weight of ``f(x[j])`` in the ``d``-th derivative.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    c = np.zeros((n, m + 1))
    c1 = 1.0
    c4 = x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c


def derivative_matrix(coords, order):
    """Dense first-derivative matrix on arbitrary increasing nodes.

    Each row uses the ``order + 1`` nearest nodes: centred in the interior,
    shifted one-sided near the ends.
    """
    coords = np.ascontiguousarray(coords, dtype=np.float64)
    n = coords.size
    width = order + 1
    D = np.zeros((n, n))
    for i in range(n):
        start = min(max(i - width // 2, 0), n - width)
        D[i, start:start + width] = fd_weights(coords[i], coords[start:start + width], 1)[:, 1]
    return D
