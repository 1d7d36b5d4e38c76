"""Self-check suites driven by the CLI: representation round trips, the
depolarizing commutation construction, correction-only optimality, the
inequality-based CPTP verdict, and the Haar second moment."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import channels, metrics, optimize
from .linalg import (
    haar_random_pure_states,
    partial_trace,
    swap_operator,
    tensor_product,
)
from .protocols import do_nothing_protocol


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.threshold


def check_swap_trace_identity(rng: np.random.Generator, d: int = 3,
                              samples: int = 50) -> CheckResult:
    """tr[S (A x B)] = tr[A B] on random complex matrices."""
    s = swap_operator(d)
    worst = 0.0
    for _ in range(samples):
        a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        b = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        lhs = np.trace(s @ tensor_product(a, b))
        worst = max(worst, abs(lhs - np.trace(a @ b)))
    return CheckResult("swap-trace identity", worst, 1e-12)


def check_representation_round_trips(rng: np.random.Generator,
                                     samples: int = 50) -> CheckResult:
    """Kraus <-> Choi for d in {2, 3} and transfer-matrix <-> Choi for d = 2."""
    worst = 0.0
    for d in (2, 3):
        for _ in range(samples):
            choi = channels.random_tpcp_choi(d, rng)
            back = channels.choi_from_kraus(channels.kraus_from_choi(choi))
            worst = max(worst, np.abs(choi - back).max())
            if d == 2:
                ptm = channels.ptm_from_choi(choi)
                back = channels.choi_from_ptm(ptm)
                worst = max(worst, np.abs(choi - back).max())
    return CheckResult("representation round trips", worst, 1e-10)


def check_depolarizing_semigroup(rng: np.random.Generator,
                                 samples: int = 20) -> CheckResult:
    """compose(D_a, D_b) = D_{a + b - a b} for d in {2, 3}."""
    worst = 0.0
    for d in (2, 3):
        for _ in range(samples):
            a, b = rng.uniform(0, 1, 2)
            lhs = channels.compose(channels.depolarizing(a, d),
                                   channels.depolarizing(b, d))
            rhs = channels.depolarizing(a + b - a * b, d)
            worst = max(worst, np.abs(lhs - rhs).max())
    return CheckResult("depolarizing semigroup", worst, 1e-12)


def check_hs_trace_basis_independence(rng: np.random.Generator,
                                      samples: int = 30) -> CheckResult:
    """Contracted Hilbert-Schmidt trace vs the explicit basis sums."""
    worst = 0.0
    for d in (2, 3):
        for _ in range(samples):
            choi = channels.random_tpcp_choi(d, rng)
            fast = metrics.hs_trace_of_map(choi)
            total = 0.0
            for k in range(d):
                for l in range(d):
                    unit = np.zeros((d, d), dtype=complex)
                    unit[k, l] = 1.0
                    total += np.trace(unit.conj().T
                                      @ channels.apply_choi(choi, unit)).real
            worst = max(worst, abs(fast - total))
            if d == 2:
                pauli_sum = 0.5 * sum(
                    np.trace(p @ channels.apply_choi(choi, p)).real
                    for p in channels.PAULI)
                worst = max(worst, abs(fast - pauli_sum))
    return CheckResult("hs-trace basis independence", worst, 1e-12)


def check_objective_consistency(rng: np.random.Generator,
                                samples: int = 25) -> CheckResult:
    """Choi-form objective vs composed-channel average metrics."""
    from .protocols import Branch, Protocol

    worst = 0.0
    for d in (2, 3):
        for _ in range(samples):
            noise = channels.random_tpcp_choi(d, rng)
            branches = []
            weights = rng.dirichlet(np.ones(2))
            for w in weights:
                inst = w * channels.random_tpcp_choi(d, rng)
                corr = channels.random_tpcp_choi(d, rng)
                branches.append(Branch(inst, corr))
            proto = Protocol(d, tuple(branches))
            f = metrics.protocol_objective_choi(proto, noise)
            direct = sum(
                metrics.hs_trace_of_map(
                    channels.compose(b.correction,
                                     channels.compose(noise, b.instrument)))
                for b in proto.branches)
            worst = max(worst, abs(f - direct))
    return CheckResult("choi-form objective consistency", worst, 1e-10)


def check_commutation(rng: np.random.Generator,
                      samples: int = 100) -> CheckResult:
    """D_eps . E = Et . D_eps with Et TPCP, on random qubit TPCP maps."""
    worst = 0.0
    for _ in range(samples):
        e = channels.random_tpcp_choi(2, rng)
        for eps in (0.1, 0.5, 0.9):
            dep = channels.depolarizing(eps, 2)
            et = channels.commute_through_depolarizing(e, eps)
            resid = np.abs(channels.compose(dep, e)
                           - channels.compose(et, dep)).max()
            worst = max(worst, resid)
            if not channels.is_tpcp(et):
                return CheckResult("depolarizing commutation", np.inf, 1e-10)
            if not channels.qubit_cptp_check_ruskai(
                    channels.ptm_from_choi(et), tol=1e-8):
                return CheckResult("depolarizing commutation", np.inf, 1e-10)
    return CheckResult("depolarizing commutation", worst, 1e-10)


def check_ruskai_agreement(rng: np.random.Generator,
                           samples: int = 2000) -> CheckResult:
    """Inequality CPTP verdict vs Choi eigenvalues; residual counts
    disagreements whose Choi spectrum is farther than 1e-8 from the boundary."""
    bad = 0
    for i in range(samples):
        if i % 2 == 0:
            ptm = channels.PauliTransferMatrix(rng.uniform(-1, 1, 3) * 0.5,
                                               rng.uniform(-1, 1, (3, 3)))
        else:
            ptm = channels.ptm_from_choi(channels.random_tpcp_choi(2, rng))
        verdict = channels.qubit_cptp_check_ruskai(ptm, tol=0.0)
        _, min_eig = channels.is_cp(channels.choi_from_ptm(ptm), tol=0.0)
        if verdict != (min_eig >= 0) and abs(min_eig) > 1e-8:
            bad += 1
    return CheckResult("ruskai cptp agreement", float(bad), 0.0)


def check_expost_optimality(rng: np.random.Generator, samples: int = 5,
                            config: optimize.AnnealConfig | None = None
                            ) -> CheckResult:
    """Brute-force and annealed corrections never beat the closed form."""
    if config is None:
        config = optimize.AnnealConfig(restarts=4, steps=1500, refine_sweeps=25,
                                       seed=7)
    worst = 0.0
    for _ in range(samples):
        noise = channels.random_tpcp_choi(2, rng)
        u, best = optimize.optimal_expost_qubit(noise)
        achieved = metrics.average_fidelity_exact(
            channels.compose(channels.unitary_channel(u), noise))
        worst = max(worst, abs(achieved - best))
        _, bf = optimize.brute_force_unitary_expost(noise, resolution=10,
                                                    rounds=3)
        worst = max(worst, max(bf - best, 0.0), max(best - bf - 1e-3, 0.0))
        annealed = optimize.brute_force_tpcp_expost(noise, config)
        worst = max(worst, max(annealed - best - 1e-6, 0.0))
    return CheckResult("correction-only unitary optimality", worst, 1e-6)


def haar_second_moment_zscores(d: int, samples: int,
                               rng: np.random.Generator) -> np.ndarray:
    """Entrywise z-scores of the empirical mean of |psi><psi| x |psi><psi|
    against (1 + S) / (d (d + 1)), real and imaginary parts stacked.

    With v = psi x psi, entry (a, b) of the sampled matrix is v_a conj(v_b);
    means and per-part variances come from second-moment contractions so the
    (samples, d^2, d^2) term tensor is never materialized.
    """
    target = (np.eye(d * d) + swap_operator(d)) / (d * (d + 1))
    psis = haar_random_pure_states(d, samples, rng)
    v = np.einsum('ni,nj->nij', psis, psis).reshape(samples, d * d)
    re, im = v.real, v.imag

    def moment(x, y):
        return np.einsum('na,nb->ab', x, y) / samples

    mean_re = moment(re, re) + moment(im, im)
    mean_im = moment(im, re) - moment(re, im)
    # E[(Re T)^2] and E[(Im T)^2] for T = v_a conj(v_b)
    sq_re = moment(re ** 2, re ** 2) + 2 * moment(re * im, re * im) \
        + moment(im ** 2, im ** 2)
    sq_im = moment(im ** 2, re ** 2) - 2 * moment(re * im, re * im) \
        + moment(re ** 2, im ** 2)
    se_re = np.sqrt(np.maximum(sq_re - mean_re ** 2, 0.0) / samples)
    se_im = np.sqrt(np.maximum(sq_im - mean_im ** 2, 0.0) / samples)
    floor = 10.0 / samples  # exact-zero entries have zero sample variance
    z_re = np.abs(mean_re - target.real) / np.maximum(se_re, floor)
    z_im = np.abs(mean_im - target.imag) / np.maximum(se_im, floor)
    return np.stack([z_re, z_im])


def check_haar_second_moment(rng: np.random.Generator,
                             samples: int = 100_000) -> CheckResult:
    """Worst entrywise z-score over d in {2, 3}, in units of 3 sigma."""
    worst = 0.0
    for d in (2, 3):
        z = haar_second_moment_zscores(d, samples, rng)
        worst = max(worst, float(z.max()) / 3.0)
    return CheckResult("haar second moment", worst, 1.0)


def check_dn_dr_values(rng: np.random.Generator) -> CheckResult:
    """Canonical protocol fidelities against their closed forms."""
    from .protocols import discriminate_reprepare_protocol

    worst = 0.0
    for d in (2, 3):
        for eps in (0.0, 0.25, 0.5, 0.75, 1.0):
            noise = channels.depolarizing(eps, d)
            dn = do_nothing_protocol(d)
            f = metrics.protocol_objective_choi(dn, noise)
            worst = max(worst, abs((d + f) / (d * (d + 1))
                                   - optimize.dn_fidelity(eps, d)))
            dr = discriminate_reprepare_protocol(np.eye(d))
            f = metrics.protocol_objective_choi(dr, noise)
            worst = max(worst, abs((d + f) / (d * (d + 1))
                                   - optimize.dr_fidelity(d)))
    return CheckResult("canonical protocol fidelities", worst, 1e-12)


def run_all(seed: int = 0, quick: bool = False,
            threads: int = 1) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    scale = 0.2 if quick else 1.0

    def n(x: int) -> int:
        return max(2, int(x * scale))

    return [
        check_swap_trace_identity(rng),
        check_representation_round_trips(rng, samples=n(50)),
        check_depolarizing_semigroup(rng),
        check_hs_trace_basis_independence(rng, samples=n(30)),
        check_objective_consistency(rng, samples=n(25)),
        check_dn_dr_values(rng),
        check_commutation(rng, samples=n(100)),
        check_ruskai_agreement(rng, samples=n(2000)),
        check_expost_optimality(rng, samples=n(5)),
        check_haar_second_moment(rng, samples=n(100_000)),
    ]
