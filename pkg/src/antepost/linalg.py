"""Dense complex-matrix primitives for bipartite systems.

Composite indices are always row-major: the basis vector ``|i, k>`` of a
bipartite space with dimensions ``(da, db)`` sits at position ``i * db + k``,
i.e. the first subsystem is the slow index.  Every partial trace / partial
transpose in the package relies on this single convention.
"""

from __future__ import annotations

import numpy as np

PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with row-major composite indexing."""
    return np.kron(np.asarray(a), np.asarray(b))


def _check_bipartite(x: np.ndarray, dims: tuple[int, int]) -> None:
    da, db = dims
    if x.ndim != 2 or x.shape[0] != x.shape[1] or x.shape[0] != da * db:
        raise ValueError(
            f"expected a square matrix of side {da * db} for dims {dims}, "
            f"got shape {x.shape}"
        )


def partial_trace(x: np.ndarray, dims: tuple[int, int], which: int) -> np.ndarray:
    """Trace out one factor of a bipartite operator.

    ``which=0`` removes the first subsystem, ``which=1`` the second.
    The full trace is preserved: ``tr(result) == tr(x)``.
    """
    x = np.asarray(x)
    _check_bipartite(x, dims)
    da, db = dims
    t = x.reshape(da, db, da, db)
    if which == 0:
        return np.einsum('aiaj->ij', t)
    if which == 1:
        return np.einsum('iaja->ij', t)
    raise ValueError(f"which must be 0 or 1, got {which}")


def partial_transpose(x: np.ndarray, dims: tuple[int, int], which: int) -> np.ndarray:
    """Transpose the indices of one factor only; an involution."""
    x = np.asarray(x)
    _check_bipartite(x, dims)
    da, db = dims
    t = x.reshape(da, db, da, db)
    if which == 0:
        out = np.einsum('aibj->biaj', t).reshape(x.shape)
    elif which == 1:
        out = np.einsum('aibj->ajbi', t).reshape(x.shape)
    else:
        raise ValueError(f"which must be 0 or 1, got {which}")
    return out


def swap_operator(d: int) -> np.ndarray:
    """The operator S with S(|psi>|phi>) = |phi>|psi>, S = sum_ij |ij><ji|.

    S is Hermitian, squares to the identity and satisfies
    tr[S (A x B)] = tr[A B] for all square A, B.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    s = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            s[i * d + j, j * d + i] = 1.0
    return s


def max_entangled_vector(d: int) -> np.ndarray:
    """Unnormalized maximally entangled vector sum_i |ii>."""
    v = np.zeros(d * d, dtype=complex)
    v[:: d + 1] = 1.0
    return v


def hs_inner(x: np.ndarray, y: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product <X, Y> = tr(X^dag Y)."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    return complex(np.vdot(x, y))


def haar_random_pure_state(d: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a Haar-uniform unit vector in C^d.

    Real and imaginary parts are i.i.d. standard normal, then the vector is
    normalized; unitary invariance of the Gaussian measure makes the result
    uniform on the unit sphere.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def haar_random_pure_states(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Batch of ``n`` Haar-uniform unit vectors, shape (n, d)."""
    v = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def haar_random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    ph = np.diag(r).copy()
    ph /= np.abs(ph)
    return q * ph


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues in [-1e-12, 0) are clipped to zero; anything lower raises.
    """
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    if w[0] < -1e-12:
        raise ValueError(f"matrix is not PSD: smallest eigenvalue {w[0]:.3e}")
    return (v * np.sqrt(np.maximum(w, 0.0))) @ v.conj().T


def psd_inv_sqrt(m: np.ndarray, floor: float = 1e-12) -> np.ndarray:
    """Inverse square root of a PSD matrix, with eigenvalues floored."""
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return (v * np.maximum(w, floor) ** -0.5) @ v.conj().T
