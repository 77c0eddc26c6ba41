"""Haar-distributed samples from O(N), U(N) and Sp(N/2).

Every sampler consumes a full N×N Gaussian draw per matrix even when only the
leading columns are orthonormalized, so two computations that differ only in
how many columns they need see the same random stream.
"""

import numpy as np

from app.errors import DomainError
from app.transforms.beta import BetaClass

# Gram-Schmidt passes per symplectic column
REORTHOGONALIZE = 2


def _check_dimension(beta: BetaClass, n: int, columns: int) -> None:
    if n < 1:
        raise DomainError(f"dimension must be at least 1, got {n}")
    if beta is BetaClass.SYMPLECTIC and n % 2:
        raise DomainError(f"symplectic sampling needs an even dimension, got {n}")
    if not 0 <= columns <= n:
        raise DomainError(f"cannot take {columns} columns of a {n}x{n} matrix")


def symplectic_partner(v: np.ndarray) -> np.ndarray:
    """(p; q) ↦ (−conj(q); conj(p)) along the last axis, the quaternionic j-multiple."""
    half = v.shape[-1] // 2
    return np.concatenate([-np.conj(v[..., half:]), np.conj(v[..., :half])], axis=-1)


def symplectic_form(n: int) -> np.ndarray:
    """J = [[0, I], [−I, 0]] in dimension n."""
    half = n // 2
    eye = np.eye(half)
    zero = np.zeros((half, half))
    return np.block([[zero, eye], [-eye, zero]])


def _orthogonal_or_unitary(gauss: np.ndarray, columns: int) -> np.ndarray:
    q, r = np.linalg.qr(gauss[..., :columns])
    # QR is only unique up to column phases; fixing diag(R) > 0 makes Q Haar
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[..., None, :]


def _symplectic(gauss: np.ndarray, columns: int) -> np.ndarray:
    """Quaternionic Gram-Schmidt on complex 2n'-vectors.

    Column k < n' is the k-th orthonormalized vector x_k and column n' + k its
    partner, which is orthogonal to x_k automatically.
    """
    size, n, half = gauss.shape
    needed = half if columns > half else columns
    basis = np.zeros((size, n, 2 * needed), dtype=complex)
    for k in range(needed):
        v = gauss[:, :, k]
        if k:
            filled = basis[:, :, : 2 * k]
            for _ in range(REORTHOGONALIZE):
                v = v - np.einsum("sij,sj->si", filled, np.einsum("sij,si->sj", filled.conj(), v))
        v = v / np.linalg.norm(v, axis=1)[:, None]
        basis[:, :, 2 * k] = v
        basis[:, :, 2 * k + 1] = symplectic_partner(v)

    firsts = basis[:, :, 0::2]
    partners = basis[:, :, 1::2]
    if columns <= half:
        return firsts[:, :, :columns]
    return np.concatenate([firsts, partners[:, :, : columns - half]], axis=2)


def haar_columns(beta: BetaClass, n: int, columns: int, rng: np.random.Generator, size: int = 1) -> np.ndarray:
    """Leading ``columns`` columns of ``size`` independent Haar matrices, shape (size, n, columns)."""
    beta = BetaClass.parse(beta)
    _check_dimension(beta, n, columns)
    if beta is BetaClass.ORTHOGONAL:
        gauss = rng.standard_normal((size, n, n))
        if columns == 0:
            return np.zeros((size, n, 0))
        return _orthogonal_or_unitary(gauss, columns)
    if beta is BetaClass.UNITARY:
        raw = rng.standard_normal((size, n, n, 2))
        if columns == 0:
            return np.zeros((size, n, 0), dtype=complex)
        return _orthogonal_or_unitary(raw[..., 0] + 1j * raw[..., 1], columns)
    raw = rng.standard_normal((size, n, n // 2, 2))
    if columns == 0:
        return np.zeros((size, n, 0), dtype=complex)
    return _symplectic(raw[..., 0] + 1j * raw[..., 1], columns)


def haar_sample(beta: BetaClass, n: int, rng: np.random.Generator) -> np.ndarray:
    """One Haar matrix of O(n) (β=1), U(n) (β=2) or Sp(n/2) (β=4).

    The symplectic sample is the n×n complex representation and satisfies
    U J Uᵀ = J for J from :func:`symplectic_form`.
    """
    return haar_columns(beta, n, n, rng)[0]


def embed_subgroup(v: np.ndarray, beta: BetaClass) -> np.ndarray:
    """Block embedding of the next smaller group: O(n−1) ⊂ O(n), U(n−1) ⊂ U(n), Sp(n'−1) ⊂ Sp(n').

    For β=4 the identity is padded at positions 0 and n', which keeps the
    symplectic structure.
    """
    beta = BetaClass.parse(beta)
    v = np.asarray(v)
    m = v.shape[0]
    if beta is BetaClass.SYMPLECTIC:
        if m % 2:
            raise DomainError(f"symplectic block must have even size, got {m}")
        half = m // 2
        n = m + 2
        keep = [i for i in range(n) if i not in (0, half + 1)]
    else:
        n = m + 1
        keep = list(range(1, n))
    out = np.eye(n, dtype=np.result_type(v.dtype, float))
    out[np.ix_(keep, keep)] = v
    return out
