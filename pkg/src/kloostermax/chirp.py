"""Prime-length DFT via the chirp (Bluestein) identity.

    y*x = (y^2 + x^2 - (y - x)^2) / 2

turns sum_x t(x) e(yx/p) into a linear convolution with the chirp
c(n) = exp(i pi n^2 / p), evaluated with power-of-two FFTs.  Chirp phases
use n^2 mod 2p computed in integers so no precision is lost for large p.
"""

import numpy as np


def _chirp(n: np.ndarray, p: int) -> np.ndarray:
    k = (n.astype(np.int64) * n) % (2 * p)
    return np.exp(1j * np.pi * k.astype(np.float64) / p)


def chirp_dft(t: np.ndarray) -> np.ndarray:
    """Return T(y) = sum_{x<p} t(x) e(+yx/p) for y = 0..p-1, p = len(t)."""
    t = np.asarray(t, dtype=np.complex128)
    p = t.size
    if p == 0:
        return t.copy()
    n = np.arange(p, dtype=np.int64)
    c = _chirp(n, p)
    size = 1 << int(2 * p - 1).bit_length()
    a = np.zeros(size, dtype=np.complex128)
    a[:p] = t * c
    b = np.zeros(size, dtype=np.complex128)
    cc = np.conj(c)
    b[:p] = cc
    if p > 1:
        b[size - p + 1:] = cc[1:][::-1]
    conv = np.fft.ifft(np.fft.fft(a) * np.fft.fft(b))
    return conv[:p] * c


def direct_dft(t: np.ndarray, ys=None) -> np.ndarray:
    """O(p) per output reference transform using an exact residue index."""
    t = np.asarray(t, dtype=np.complex128)
    p = t.size
    x = np.arange(p, dtype=np.int64)
    roots = np.exp(2j * np.pi * x.astype(np.float64) / p)
    ys = np.arange(p) if ys is None else np.asarray(ys, dtype=np.int64)
    out = np.empty(len(ys), dtype=np.complex128)
    for i, y in enumerate(ys):
        out[i] = np.dot(t, roots[(int(y) * x) % p])
    return out
