"""Eigen utilities for PSD matrices and the complex-to-real embedding."""

import numpy as np


def psd_eigendecomposition(x, herm_tol=1e-8):
    """Eigendecomposition of a (near-)Hermitian PSD matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues sorted in
    descending order and eigenvectors in matching columns, so that
    ``x ~= v @ diag(w) @ v.conj().T``.  Rejects inputs whose Hermitian
    deviation exceeds ``herm_tol`` relative to the matrix norm.
    """
    x = np.asarray(x)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError("expected a square matrix")
    scale = max(1.0, float(np.linalg.norm(x)))
    if np.linalg.norm(x - x.conj().T) > herm_tol * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh((x + x.conj().T) / 2.0)
    return w[::-1].copy(), v[:, ::-1].copy()


def numerical_rank(eigenvalues, rel_tol=1e-6):
    """Count of eigenvalues exceeding ``rel_tol`` times the largest one.

    Input must be sorted descending (as returned by
    :func:`psd_eigendecomposition`); the rank of an all-zero spectrum is 0.
    """
    w = np.asarray(eigenvalues, dtype=float)
    if w.size == 0:
        return 0
    largest = w[0]
    if largest <= 0.0:
        return 0
    return int(np.count_nonzero(w > rel_tol * largest))


def embed_hermitian(h):
    """Real symmetric 2n x 2n embedding [[Re, -Im], [Im, Re]] of Hermitian h."""
    h = np.asarray(h, dtype=complex)
    re, im = h.real, h.imag
    return np.block([[re, -im], [im, re]])


def project_embedded(y):
    """Inverse of :func:`embed_hermitian` on the embedded subspace.

    For a general symmetric 2n x 2n matrix this is the orthogonal projection
    onto embedded matrices; it maps PSD to PSD and preserves all trace inner
    products against embedded constraint matrices.
    """
    y = np.asarray(y, dtype=float)
    n = y.shape[0] // 2
    re = (y[:n, :n] + y[n:, n:]) / 2.0
    im = (y[n:, :n] - y[:n, n:]) / 2.0
    re = (re + re.T) / 2.0
    im = (im - im.T) / 2.0
    return re + 1j * im
