"""Control protocols: a pre-noise instrument plus per-outcome corrections.

A protocol is an ordered list of branches ``(instrument, correction)``, both
stored as Choi operators.  The instrument pieces are CP maps whose sum is
trace-preserving; each correction is a TPCP map applied after the noise when
the corresponding measurement outcome occurred.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import channels
from .linalg import partial_trace, psd_sqrt


class InvalidProtocolError(ValueError):
    """Raised when a protocol violates its CP / trace-preservation contract."""


class Branch(NamedTuple):
    instrument: np.ndarray
    correction: np.ndarray


@dataclass(frozen=True)
class Protocol:
    """Validation happens in :func:`validate_protocol`, not at construction,
    so optimizer candidates may be carried around before they are feasible."""

    dim: int
    branches: tuple[Branch, ...]

    def __post_init__(self):
        object.__setattr__(
            self, 'branches',
            tuple(Branch(np.asarray(i, dtype=complex), np.asarray(c, dtype=complex))
                  for i, c in self.branches))


def validate_protocol(protocol: Protocol, tol: float = 1e-8) -> None:
    d = protocol.dim
    if not protocol.branches:
        raise InvalidProtocolError("protocol has no branches")
    total = np.zeros((d, d), dtype=complex)
    for idx, (inst, corr) in enumerate(protocol.branches):
        if inst.shape != (d * d, d * d) or corr.shape != (d * d, d * d):
            raise InvalidProtocolError(f"branch {idx} has wrong Choi shape")
        ok, witness = channels.is_cp(inst, tol)
        if not ok:
            raise InvalidProtocolError(
                f"instrument {idx} is not CP (min eigenvalue {witness:.3e})")
        if not channels.is_tpcp(corr, tol):
            raise InvalidProtocolError(f"correction {idx} is not TPCP")
        total += partial_trace(inst, (d, d), 0)
    if np.abs(total - np.eye(d)).max() > tol:
        raise InvalidProtocolError(
            "instrument branches do not sum to a trace-preserving map")


def do_nothing_protocol(d: int, branches: int | None = None) -> Protocol:
    """Identity instrument split uniformly over branches, identity corrections.

    Default branch count: 2 for a qubit, d otherwise.
    """
    if branches is None:
        branches = 2 if d == 2 else d
    if branches < 1:
        raise ValueError("need at least one branch")
    ident = channels.identity_choi(d)
    return Protocol(d, tuple(Branch(ident / branches, ident.copy())
                             for _ in range(branches)))


def discriminate_reprepare_protocol(basis: Sequence[np.ndarray]) -> Protocol:
    """Measure in an orthonormal basis before the noise, reprepare after.

    Branch w implements rho -> |w><w| rho |w><w| followed by the correction
    rho -> |w><w| tr(rho), which discards the noisy state entirely.
    """
    vecs = [np.asarray(v, dtype=complex).reshape(-1) for v in basis]
    d = vecs[0].shape[0]
    if len(vecs) != d:
        raise ValueError(f"need {d} basis states, got {len(vecs)}")
    gram = np.array([[np.vdot(a, b) for b in vecs] for a in vecs])
    if np.abs(gram - np.eye(d)).max() > 1e-10:
        raise ValueError("basis is not orthonormal within 1e-10")
    out = []
    for v in vecs:
        proj = np.outer(v, v.conj())
        inst = channels.choi_from_kraus([proj])
        corr = np.kron(proj, np.eye(d, dtype=complex))
        out.append(Branch(inst, corr))
    return Protocol(d, tuple(out))


def validate_povm(elements: Sequence[np.ndarray], tol: float = 1e-10) -> int:
    mats = [np.asarray(m, dtype=complex) for m in elements]
    d = mats[0].shape[0]
    total = np.zeros((d, d), dtype=complex)
    for idx, m in enumerate(mats):
        if m.shape != (d, d):
            raise ValueError(f"POVM element {idx} has shape {m.shape}, expected {(d, d)}")
        w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
        if w[0] < -tol or np.abs(m - m.conj().T).max() > tol:
            raise ValueError(f"POVM element {idx} is not positive")
        total += m
    if np.abs(total - np.eye(d)).max() > tol:
        raise ValueError("POVM elements do not sum to the identity")
    return d


def simple_instrument_from_povm(elements: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Instrument branches rho -> sqrt(M_w) rho sqrt(M_w) for a POVM {M_w}."""
    validate_povm(elements)
    return [channels.choi_from_kraus([psd_sqrt(np.asarray(m, dtype=complex))])
            for m in elements]


def average_operation(protocol: Protocol, noise: np.ndarray) -> np.ndarray:
    """Choi operator of the outcome-averaged map sum_w C_w . N . I_w."""
    d = channels.dim_of_choi(noise)
    if d != protocol.dim:
        raise ValueError("noise dimension does not match protocol")
    total = np.zeros((d * d, d * d), dtype=complex)
    for inst, corr in protocol.branches:
        total += channels.compose(corr, channels.compose(noise, inst))
    return total


def branch_probabilities(protocol: Protocol, rho: np.ndarray) -> np.ndarray:
    """Born probabilities tr[I_w(rho)] of each branch; clamps values < 1e-15."""
    p = np.array([np.trace(channels.apply_choi(inst, rho)).real
                  for inst, _ in protocol.branches])
    p[p < 1e-15] = 0.0
    if abs(p.sum() - 1.0) > 1e-8:
        raise InvalidProtocolError(
            f"branch probabilities sum to {p.sum():.10f}, not 1")
    return p / p.sum()


def sample_branch(protocol: Protocol, rho: np.ndarray,
                  rng: np.random.Generator) -> tuple[int, np.ndarray]:
    """Draw an outcome by the Born rule and return the renormalized state."""
    p = branch_probabilities(protocol, rho)
    idx = int(np.searchsorted(np.cumsum(p), rng.random(), side='right'))
    idx = min(idx, len(p) - 1)
    post = channels.apply_choi(protocol.branches[idx].instrument, rho)
    return idx, post / np.trace(post).real


# ---------------------------------------------------------------------------
# serialization: matrices as nested arrays of [re, im] pairs
# ---------------------------------------------------------------------------

def _matrix_to_json(m: np.ndarray) -> list:
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def _matrix_from_json(rows: list) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def protocol_to_json_dict(protocol: Protocol) -> dict:
    return {
        "dim": protocol.dim,
        "branches": [
            {"instrument": _matrix_to_json(b.instrument),
             "correction": _matrix_to_json(b.correction)}
            for b in protocol.branches
        ],
    }


def protocol_from_json_dict(doc: dict) -> Protocol:
    branches = tuple(
        Branch(_matrix_from_json(b["instrument"]), _matrix_from_json(b["correction"]))
        for b in doc["branches"])
    return Protocol(int(doc["dim"]), branches)


def save_protocol(protocol: Protocol, path) -> None:
    with open(path, 'w', encoding='utf-8') as fh:
        json.dump(protocol_to_json_dict(protocol), fh)


def load_protocol(path) -> Protocol:
    with open(path, encoding='utf-8') as fh:
        return protocol_from_json_dict(json.load(fh))
