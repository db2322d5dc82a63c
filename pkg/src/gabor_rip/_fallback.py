"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""
import numpy as np


def gram_batch(table, omega, ks, ls):
    n = table.shape[0]
    ki = ks[:, :, None]
    li = ls[:, :, None]
    dk = (ks[:, None, :] - ki) % n
    dl = (ls[:, None, :] - li) % n
    return omega[(dl * ki) % n] * table[dk, dl]


def sparse_synthesis(window, omega, ks, ls, values):
    n = window.shape[0]
    q = np.arange(n)
    k = ks[:, None] % n
    atoms = omega[(ls[:, None] * q[None, :]) % n] * window[(q[None, :] - k) % n]
    return values @ atoms
