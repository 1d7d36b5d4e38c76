"""Average-fidelity evaluation: exact, Monte-Carlo, and in Choi form.

The exact route uses the identity

    F_bar(E) = (d + t) / (d (d + 1)),    t = Tr_HS(E),

where Tr_HS is the trace of the channel viewed as an operator on the
Hilbert-Schmidt space, t = sum_i <V_i, E(V_i)> over any orthonormal operator
basis.  In Choi components this collapses to t = sum_ij C[i, i, j, j].

The Choi-form objective evaluates the same quantity for a whole protocol as
an explicit polynomial in the branch Choi operators, which is what the
optimizer needs: for each branch,

    f_w = tr[R_w (id x N)(S)],
    R_w = Tr_mid[(1 x correction^T)(instrument x 1)],

and F_bar = (d + sum_w f_w) / (d (d + 1)) whenever the protocol is valid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import channels
from .linalg import haar_random_pure_states, partial_trace
from .protocols import InvalidProtocolError, Protocol

_MC_BLOCK = 4096


def fidelity(rho: np.ndarray, psi: np.ndarray) -> float:
    """<psi| rho |psi>, the fidelity of a state with a pure reference."""
    rho = np.asarray(rho)
    psi = np.asarray(psi).reshape(-1)
    if rho.shape != (psi.shape[0], psi.shape[0]):
        raise ValueError(f"dimension mismatch: rho {rho.shape}, psi {psi.shape}")
    return float(np.vdot(psi, rho @ psi).real)


def hs_trace_of_map(choi: np.ndarray) -> float:
    """Hilbert-Schmidt trace of the channel, tr[S (id x E)(S)] = sum C[i,i,j,j]."""
    return float(np.einsum('iijj->', channels.choi_tensor(choi)).real)


def average_fidelity_exact(choi: np.ndarray) -> float:
    """Average fidelity of the channel over Haar-uniform pure inputs."""
    d = channels.dim_of_choi(choi)
    return (d + hs_trace_of_map(choi)) / (d * (d + 1))


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    samples: int


def average_fidelity_monte_carlo(protocol: Protocol, noise: np.ndarray, n: int,
                                 rng: np.random.Generator) -> McEstimate:
    """Simulate the physical pipeline and average the output fidelity.

    Per sample: draw a Haar state, select a branch by the Born rule, apply the
    renormalized instrument piece, the noise, the branch correction, and score
    the result against the input state.  Samples are processed in fixed-size
    blocks, each on an independently spawned substream, merged by weighted
    average.
    """
    d = protocol.dim
    if channels.dim_of_choi(noise) != d:
        raise ValueError("noise dimension does not match protocol")
    margs = [partial_trace(b.instrument, (d, d), 0) for b in protocol.branches]
    inst4 = [channels.choi_tensor(b.instrument) for b in protocol.branches]
    corr4 = [channels.choi_tensor(b.correction) for b in protocol.branches]
    noise4 = channels.choi_tensor(noise)

    nblocks = (n + _MC_BLOCK - 1) // _MC_BLOCK
    streams = rng.spawn(nblocks)
    total = 0.0
    total_sq = 0.0
    for block, sub in enumerate(streams):
        nb = min(_MC_BLOCK, n - block * _MC_BLOCK)
        psis = haar_random_pure_states(d, nb, sub)
        rhos = np.einsum('ni,nj->nij', psis, psis.conj())
        probs = np.stack(
            [np.einsum('ij,nij->n', m, rhos).real for m in margs], axis=1)
        probs[probs < 1e-15] = 0.0
        sums = probs.sum(axis=1)
        if np.abs(sums - 1.0).max() > 1e-8:
            raise InvalidProtocolError(
                "branch probabilities do not sum to 1 within 1e-8")
        cum = np.cumsum(probs / sums[:, None], axis=1)
        idx = (sub.random(nb)[:, None] > cum[:, :-1]).sum(axis=1)
        fids = np.empty(nb)
        for w in range(len(protocol.branches)):
            sel = idx == w
            if not sel.any():
                continue
            out = np.einsum('aibj,nij->nab', inst4[w], rhos[sel])
            out /= np.einsum('naa->n', out).real[:, None, None]
            out = np.einsum('aibj,nij->nab', noise4, out)
            out = np.einsum('aibj,nij->nab', corr4[w], out)
            fids[sel] = np.einsum('ni,nij,nj->n', psis[sel].conj(), out,
                                  psis[sel]).real
        total += fids.sum()
        total_sq += (fids ** 2).sum()
    mean = total / n
    var = max(total_sq / n - mean ** 2, 0.0)
    return McEstimate(mean=mean, std_error=float(np.sqrt(var / n)), samples=n)


def _noise_kernel(noise: np.ndarray) -> np.ndarray:
    """(id x N)(S) arranged as K[a, b, p, q] for the branch contraction."""
    return np.einsum('bABa->abAB', channels.choi_tensor(noise))


def branch_objective(instrument: np.ndarray, correction: np.ndarray,
                     kernel: np.ndarray) -> float:
    """tr[R_w (id x N)(S)] for one branch, as a polynomial in the Chois."""
    c4 = channels.choi_tensor(correction)
    i4 = channels.choi_tensor(instrument)
    return float(np.einsum('cqeb,acpe,pqab->', c4, i4, kernel,
                           optimize=True).real)


def protocol_objective_choi(protocol: Protocol, noise: np.ndarray) -> float:
    """sum_w tr[R_w (id x N)(S)]; defined for arbitrary candidate Chois.

    For a valid protocol this equals Tr_HS of the average operation, so
    (d + value) / (d (d + 1)) is the exact average fidelity.
    """
    if channels.dim_of_choi(noise) != protocol.dim:
        raise ValueError("noise dimension does not match protocol")
    kernel = _noise_kernel(noise)
    return sum(branch_objective(b.instrument, b.correction, kernel)
               for b in protocol.branches)


def objective_kernel_matrix(noise: np.ndarray) -> np.ndarray:
    """Matrix W with branch objective = vec(correction) . (W @ vec(instrument)).

    Precomputing W turns repeated objective evaluations into a single matrix
    -vector product per branch; the optimizer leans on this.
    """
    d = channels.dim_of_choi(noise)
    kernel = _noise_kernel(noise)
    eye = np.eye(d)
    w8 = np.einsum('pqab,cf,eg->cqebafpg', kernel, eye, eye)
    n = d ** 4
    return np.ascontiguousarray(w8.reshape(n, n))


def penalty(protocol: Protocol) -> float:
    """sum_w tr[(Tr_out C_w - 1)^2] + tr[(Tr_out sum_w I_w - 1)^2].

    Zero exactly when every correction is trace-preserving and the instrument
    sums to a trace-preserving map.
    """
    d = protocol.dim
    eye = np.eye(d)
    total = 0.0
    inst_marg = -eye.astype(complex)
    for inst, corr in protocol.branches:
        mc = partial_trace(corr, (d, d), 0) - eye
        total += float((mc @ mc).trace().real)
        inst_marg = inst_marg + partial_trace(inst, (d, d), 0)
    total += float((inst_marg @ inst_marg).trace().real)
    return total
