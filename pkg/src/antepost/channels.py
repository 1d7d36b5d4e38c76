"""Quantum channels as Choi operators, Kraus sets and Pauli transfer matrices.

Choi convention
---------------
The Choi operator of a map E on a d-dimensional system is the d^2 x d^2 matrix

    choi = (E x id)(|Psi><Psi|),        |Psi> = sum_i |ii>,

so the *first* tensor factor carries the map output and the second the input
copy.  Application and trace preservation read

    E(rho)  = Tr_first[... ] equivalently  E(rho)[a,b] = sum_ij rho[i,j] C[a,i,b,j],
    E is TP  <=>  Tr_first(choi) = identity,

with ``C = choi.reshape(d, d, d, d)`` in the package-wide row-major indexing.

Qubit transfer matrices
-----------------------
A qubit channel is stored as the affine pair (t, e) with

    E(1) = 1 + sum_k t[k] sigma_k,      E(sigma_j) = sum_k e[j, k] sigma_k,

so the Bloch-vector action is x -> t + e.T @ x.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import PAULI, max_entangled_vector, partial_trace

DEFAULT_CP_TOL = 1e-9


def dim_of_choi(choi: np.ndarray) -> int:
    d = int(round(np.sqrt(choi.shape[0])))
    if choi.shape != (d * d, d * d):
        raise ValueError(f"not a Choi-shaped matrix: {choi.shape}")
    return d


def choi_tensor(choi: np.ndarray) -> np.ndarray:
    """View a Choi matrix as the 4-index tensor C[a, i, b, j]."""
    d = dim_of_choi(choi)
    return choi.reshape(d, d, d, d)


def apply_choi(choi: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Apply the channel with the given Choi operator to a d x d matrix."""
    d = dim_of_choi(choi)
    rho = np.asarray(rho)
    if rho.shape != (d, d):
        raise ValueError(f"state shape {rho.shape} does not match channel dim {d}")
    return np.einsum('aibj,ij->ab', choi_tensor(choi), rho)


def compose(outer: np.ndarray, inner: np.ndarray) -> np.ndarray:
    """Choi operator of outer . inner (inner acts first)."""
    d = dim_of_choi(outer)
    if inner.shape != outer.shape:
        raise ValueError("cannot compose channels of different dimension")
    t = np.einsum('acbd,cidj->aibj', choi_tensor(outer), choi_tensor(inner))
    return t.reshape(d * d, d * d)


def choi_from_kraus(operators) -> np.ndarray:
    """Choi operator of rho -> sum_k A_k rho A_k^dag."""
    a = np.asarray(operators, dtype=complex)
    if a.ndim == 2:
        a = a[None]
    d = a.shape[1]
    return np.einsum('kai,kbj->aibj', a, a.conj()).reshape(d * d, d * d)


def kraus_from_choi(choi: np.ndarray, tol: float = DEFAULT_CP_TOL) -> list[np.ndarray]:
    """Kraus operators from the eigendecomposition of a CP Choi operator.

    Eigenvalues in [-tol, tol] are treated as zero and produce no operator;
    an eigenvalue below -tol is a genuine CP violation and raises.
    """
    d = dim_of_choi(choi)
    w, v = np.linalg.eigh(0.5 * (choi + choi.conj().T))
    if w[0] < -tol:
        raise ValueError(f"Choi operator is not CP: smallest eigenvalue {w[0]:.3e}")
    ops = []
    for lam, vec in zip(w, v.T):
        if lam > tol:
            ops.append(np.sqrt(lam) * vec.reshape(d, d))
    return ops


def identity_choi(d: int) -> np.ndarray:
    psi = max_entangled_vector(d)
    return np.outer(psi, psi.conj())


def depolarizing(eps: float, d: int) -> np.ndarray:
    """Choi operator of rho -> (1 - eps) rho + eps tr(rho) / d.

    Trace-preserving for every real eps; CP only on the physical range
    eps in [0, d^2 / (d^2 - 1)].  Values outside [0, 1] are accepted because
    the formal inverse D_{-eps/(1-eps)} is needed internally.
    """
    return (1.0 - eps) * identity_choi(d) + (eps / d) * np.eye(d * d, dtype=complex)


def unitary_channel(u: np.ndarray) -> np.ndarray:
    """Choi operator of rho -> U rho U^dag; rejects non-unitary input."""
    u = np.asarray(u, dtype=complex)
    d = u.shape[0]
    if u.shape != (d, d) or np.abs(u.conj().T @ u - np.eye(d)).max() > 1e-10:
        raise ValueError("input is not unitary within 1e-10")
    return choi_from_kraus([u])


def is_cp(choi: np.ndarray, tol: float = DEFAULT_CP_TOL) -> tuple[bool, float]:
    """CP test on the Choi spectrum; returns (verdict, smallest eigenvalue)."""
    w = np.linalg.eigvalsh(0.5 * (choi + choi.conj().T))
    return bool(w[0] >= -tol), float(w[0])


def is_tp(choi: np.ndarray, tol: float = 1e-9) -> bool:
    """TP test: the output-side partial trace must be the identity."""
    d = dim_of_choi(choi)
    marg = partial_trace(choi, (d, d), 0)
    return bool(np.abs(marg - np.eye(d)).max() <= tol)


def is_tpcp(choi: np.ndarray, tol: float = DEFAULT_CP_TOL) -> bool:
    return is_cp(choi, tol)[0] and is_tp(choi, tol)


def random_tpcp_choi(d: int, rng: np.random.Generator) -> np.ndarray:
    """Random full-support TPCP map.

    A complex Gaussian square gives a random positive matrix; the symmetric
    normalization (1 x M^{-1/2}) W (1 x M^{-1/2}) with M = Tr_first(W) makes
    the result trace-preserving without breaking positivity.
    """
    g = rng.standard_normal((d * d, d * d)) + 1j * rng.standard_normal((d * d, d * d))
    w = g @ g.conj().T
    m = partial_trace(w, (d, d), 0)
    ev, v = np.linalg.eigh(m)
    x = np.kron(np.eye(d), v @ np.diag(ev ** -0.5) @ v.conj().T)
    return x @ w @ x.conj().T


# ---------------------------------------------------------------------------
# qubit transfer-matrix representation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PauliTransferMatrix:
    """Affine qubit-channel representation (t, e); see module docstring."""

    t: np.ndarray
    e: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 't', np.asarray(self.t, dtype=float).reshape(3))
        object.__setattr__(self, 'e', np.asarray(self.e, dtype=float).reshape(3, 3))

    def bloch_matrix(self) -> np.ndarray:
        """Matrix acting on Bloch vectors: x -> t + bloch_matrix() @ x."""
        return self.e.T


@dataclass(frozen=True)
class RotationDecomposition:
    """Factorization e = r @ diag(d_diag) @ rtilde with r, rtilde in SO(3).

    ``t_rotated`` is the channel shift expressed in the frame in which the
    Bloch action is x -> t_rotated + diag(d_diag) @ x up to the two rotations,
    i.e. the frame the qubit CPTP inequalities are stated in.
    """

    r: np.ndarray
    rtilde: np.ndarray
    d_diag: np.ndarray
    t_rotated: np.ndarray


def ptm_from_choi(choi: np.ndarray) -> PauliTransferMatrix:
    d = dim_of_choi(choi)
    if d != 2:
        raise ValueError(f"transfer matrices are implemented for qubits only, got d={d}")
    img0 = apply_choi(choi, PAULI[0])
    t = np.array([0.5 * np.trace(PAULI[k] @ img0).real for k in (1, 2, 3)])
    e = np.empty((3, 3))
    for j in (1, 2, 3):
        img = apply_choi(choi, PAULI[j])
        for k in (1, 2, 3):
            e[j - 1, k - 1] = 0.5 * np.trace(PAULI[k] @ img).real
    return PauliTransferMatrix(t, e)


def choi_from_ptm(ptm: PauliTransferMatrix) -> np.ndarray:
    """Inverse of ptm_from_choi.

    Uses choi = (1/2) sum_mu E(sigma_mu) x sigma_mu^T, the Pauli expansion of
    (E x id)(|Psi><Psi|).
    """
    images = [PAULI[0] + sum(ptm.t[k] * PAULI[k + 1] for k in range(3))]
    for j in range(3):
        images.append(sum(ptm.e[j, k] * PAULI[k + 1] for k in range(3)))
    choi = np.zeros((4, 4), dtype=complex)
    for mu in range(4):
        choi += 0.5 * np.kron(images[mu], PAULI[mu].T)
    return choi


def ptm_rotation_decomposition(ptm: PauliTransferMatrix) -> RotationDecomposition:
    """Signed-SVD factorization of the transfer matrix through SO(3) rotations.

    Sign flips of the SVD factors are absorbed into the diagonal so that both
    orthogonal factors have determinant +1; consequently the product of the
    signed singular values carries sign(det e).  Degenerate singular values
    keep whatever factorization the SVD returns.
    """
    u, s, vt = np.linalg.svd(ptm.e)
    s = s.copy()
    if np.linalg.det(u) < 0:
        u = u.copy()
        u[:, 2] *= -1.0
        s[2] *= -1.0
    if np.linalg.det(vt) < 0:
        vt = vt.copy()
        vt[2, :] *= -1.0
        s[2] *= -1.0
    return RotationDecomposition(r=u, rtilde=vt, d_diag=s, t_rotated=vt @ ptm.t)


def qubit_cptp_check_ruskai(ptm: PauliTransferMatrix, tol: float = 1e-12) -> bool:
    """Inequality-based CPTP verdict for the trace-preserving qubit map (t, e).

    Evaluates, on the rotation-decomposed parameters (t1, t2, t3, d1, d2, d3):

        |t_i| + |d_i| <= 1,
        (d1 + d2)^2 <= (1 + d3)^2 - t3^2
                       - (t1^2 + t2^2) (1 + d3 +/- t3) / (1 - d3 +/- t3),
        (d1 - d2)^2 <= (1 - d3)^2 - t3^2
                       - (t1^2 + t2^2) (1 - d3 +/- t3) / (1 + d3 +/- t3),
        [1 - sum d_i^2 - sum t_i^2]^2
            >= 4 [d1^2 (t1^2 + d2^2) + d2^2 (t2^2 + d3^2)
                  + d3^2 (t3^2 + d1^2) - 2 d1 d2 d3],

    each +/- condition for both signs.  Agrees with the Choi-eigenvalue CP
    test away from the CP boundary (cross-checked against it in the tests).
    """
    dec = ptm_rotation_decomposition(ptm)
    t1, t2, t3 = dec.t_rotated
    d1, d2, d3 = dec.d_diag
    if np.any(np.abs(dec.t_rotated) + np.abs(dec.d_diag) > 1.0 + tol):
        return False
    tperp = t1 * t1 + t2 * t2
    for sign in (1.0, -1.0):
        term = 0.0
        if tperp > tol * tol:
            den = 1.0 - d3 + sign * t3
            if den <= 0.0:
                return False
            term = tperp * (1.0 + d3 + sign * t3) / den
        if (d1 + d2) ** 2 > (1.0 + d3) ** 2 - t3 * t3 - term + tol:
            return False
        term = 0.0
        if tperp > tol * tol:
            den = 1.0 + d3 + sign * t3
            if den <= 0.0:
                return False
            term = tperp * (1.0 - d3 + sign * t3) / den
        if (d1 - d2) ** 2 > (1.0 - d3) ** 2 - t3 * t3 - term + tol:
            return False
    lhs = (1.0 - (d1 ** 2 + d2 ** 2 + d3 ** 2) - (t1 ** 2 + t2 ** 2 + t3 ** 2)) ** 2
    rhs = 4.0 * (d1 ** 2 * (t1 ** 2 + d2 ** 2) + d2 ** 2 * (t2 ** 2 + d3 ** 2)
                 + d3 ** 2 * (t3 ** 2 + d1 ** 2) - 2.0 * d1 * d2 * d3)
    return bool(lhs >= rhs - tol)


def qubit_extreme_closure_check(ptm: PauliTransferMatrix, tol: float = 1e-9) -> bool:
    """Whether (t, e) lies in the closure of the extreme TPCP qubit maps.

    The criterion, with one distinguished axis k and the other two i, j:

        d_k = d_i d_j,   t_i = t_j = 0,   t_k^2 = (1 - d_i^2)(1 - d_j^2).

    The rotation decomposition leaves the axis assignment free, so all three
    choices of k are tried.
    """
    dec = ptm_rotation_decomposition(ptm)
    t = dec.t_rotated
    dd = dec.d_diag
    for k in range(3):
        i, j = [a for a in range(3) if a != k]
        if (abs(dd[k] - dd[i] * dd[j]) <= tol
                and abs(t[i]) <= tol and abs(t[j]) <= tol
                and abs(t[k] ** 2 - (1 - dd[i] ** 2) * (1 - dd[j] ** 2)) <= tol):
            return True
    return False


def commute_through_depolarizing(choi: np.ndarray, eps: float) -> np.ndarray:
    """The TPCP map Et with D_eps . E = Et . D_eps, for a qubit TPCP map E.

    Built as Et = D_eps . E . D_{-eps/(1-eps)} using the formal inverse of the
    depolarizing channel; the middle factor is not CP but the product is.
    At the endpoints eps = 0, 1 the construction degenerates and E itself
    already commutes, so it is returned unchanged.
    """
    d = dim_of_choi(choi)
    if d != 2:
        raise ValueError("the commutation construction is only established for qubits")
    if eps <= 0.0 or eps >= 1.0:
        return choi.copy()
    dep = depolarizing(eps, d)
    dep_inv = depolarizing(-eps / (1.0 - eps), d)
    return compose(dep, compose(choi, dep_inv))
