"""Generalization-bound terms, breakdown threshold, and concentration checks.

``theorem1_bound`` evaluates the two raw terms of the noisy-kernel
generalization bound

    sqrt(c1 / n) + sqrt(n / (c2 sqrt(m))),

with c1 = Y' Q^-1 Y, c_Q = ||Q^-1||_2 and

    c2 = max( c_Q^-2 / (sqrt(log(4 n^2 / delta) / 2) + sqrt(m) p (1 + 2^-(N+1)))
              - (n / sqrt(m)) / c_Q,  0 ).

No hidden logarithmic prefactors are applied; a zero c2 maps the noise
term to +inf (the regime where the bound is vacuous).  The "inf" shot
sentinel is evaluated as the m -> infinity limit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .kernels import NoiseModel, parse_shots
from .rng import stream


@dataclass(frozen=True)
class BoundReport:
    n: int
    m: float
    num_qubits: int
    p: float
    c1: float
    c_q: float
    c2: float
    term_ideal: float
    term_noise: float
    breakdown_p: float
    delta: float

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "m": "inf" if math.isinf(self.m) else int(self.m),
            "num_qubits": self.num_qubits,
            "p": self.p,
            "c1": self.c1,
            "c_q": self.c_q,
            "c2": self.c2,
            "term_ideal": self.term_ideal,
            "term_noise": self.term_noise,
            "breakdown_p": self.breakdown_p,
            "delta": self.delta,
        }
        return out


def _c_q(q: np.ndarray) -> float:
    """Spectral norm of Q^-1; for PSD Q this is 1 / lambda_min."""
    return linalg.spectral_norm(linalg.inv_ridge(q, 0.0))


def c2_constant(
    n: int, m: float, p: float, c_q: float, num_qubits: int, delta: float
) -> float:
    """The clamped noise constant of the generalization bound."""
    mix = 1.0 + 2.0 ** (-(num_qubits + 1))
    log_term = math.sqrt(0.5 * math.log(4.0 * n * n / delta))
    sqrt_m = math.sqrt(m)
    shot_term = sqrt_m * p * mix if p > 0.0 else 0.0  # avoid inf * 0 at m = inf
    denom = log_term + shot_term
    lead = 0.0 if math.isinf(denom) else (c_q**-2) / denom
    tail = 0.0 if math.isinf(sqrt_m) else (n / sqrt_m) / c_q
    return max(lead - tail, 0.0)


def theorem1_bound(
    q: np.ndarray | object,
    y: np.ndarray,
    m,
    noise: NoiseModel,
    num_qubits: int,
    delta: float = 0.05,
) -> BoundReport:
    """Evaluate both bound terms for a PSD training kernel and its labels."""
    qm = linalg.check_symmetric(q, "Q")
    y = np.asarray(y, dtype=float)
    n = qm.shape[0]
    if y.shape != (n,):
        raise ValueError(f"labels must have length {n}")
    m = parse_shots(m)
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    q_inv = linalg.inv_ridge(qm, 0.0)
    c1 = float(y @ q_inv @ y)
    c_q = linalg.spectral_norm(q_inv)
    p = noise.rate
    c2 = c2_constant(n, m, p, c_q, num_qubits, delta)
    if c2 == 0.0:
        term_noise = math.inf
    else:
        ratio = n / (c2 * math.sqrt(m))  # 0 at the m = inf sentinel
        term_noise = math.sqrt(ratio)
    return BoundReport(
        n=n,
        m=m,
        num_qubits=num_qubits,
        p=p,
        c1=c1,
        c_q=c_q,
        c2=c2,
        term_ideal=math.sqrt(c1 / n),
        term_noise=term_noise,
        breakdown_p=breakdown_threshold(qm, n, num_qubits),
        delta=delta,
    )


def breakdown_threshold(q: np.ndarray | object, n: int, num_qubits: int) -> float:
    """Effective rate beyond which the noise term is unconditionally infinite:
    p > 1 / (n c_Q (1 + 2^-(N+1)))."""
    qm = linalg.check_symmetric(q, "Q")
    c_q = _c_q(qm)
    return 1.0 / (n * c_q * (1.0 + 2.0 ** (-(num_qubits + 1))))


@dataclass(frozen=True)
class SaturationReport:
    """Norms of the inverse deviation between ideal and estimated kernels.

    ``lower_ok`` checks the dimension-scaled norm relation
    ``s2 >= s_frob / sqrt(n)``.  ``sqrt_lower`` is a plotting aid: the
    square-rooted lower bound ``sqrt(sqrt(n) * eps)`` with ``eps`` the
    mean entrywise inverse deviation measured on this instance.
    """

    s2: float
    s_frob: float
    lower_ok: bool
    sqrt_s2: float
    eps_mean: float
    sqrt_lower: float

    def to_dict(self) -> dict:
        return {
            "s2": self.s2,
            "s_frob": self.s_frob,
            "lower_ok": self.lower_ok,
            "sqrt_s2": self.sqrt_s2,
            "eps_mean": self.eps_mean,
            "sqrt_lower": self.sqrt_lower,
        }


def saturation_diagnostic(
    q: np.ndarray | object, w_hat: np.ndarray | object, ridge: float = 0.0
) -> SaturationReport:
    qm = linalg.check_symmetric(q, "Q")
    wm = linalg.check_symmetric(w_hat, "W")
    if qm.shape != wm.shape:
        raise ValueError(f"shape mismatch: {qm.shape} vs {wm.shape}")
    n = qm.shape[0]
    diff = linalg.inv_ridge(qm, ridge) - linalg.inv_ridge(wm, ridge)
    s2 = float(np.linalg.norm(diff, 2))
    s_frob = float(np.linalg.norm(diff, "fro"))
    eps = float(np.mean(np.abs(diff)))
    return SaturationReport(
        s2=s2,
        s_frob=s_frob,
        lower_ok=s2 >= s_frob / math.sqrt(n) - 1e-12,
        sqrt_s2=math.sqrt(s2),
        eps_mean=eps,
        sqrt_lower=math.sqrt(math.sqrt(n) * eps),
    )


@dataclass(frozen=True)
class HoeffdingReport:
    q: float
    m: int
    delta_gap: float
    trials: int
    empirical_rate: float
    bound: float
    slack: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "m": self.m,
            "delta_gap": self.delta_gap,
            "trials": self.trials,
            "empirical_rate": self.empirical_rate,
            "bound": self.bound,
            "slack": self.slack,
            "passed": self.passed,
        }


def hoeffding_violation_test(
    q: float, m: int, delta_gap: float, trials: int, seed: int = 0
) -> HoeffdingReport:
    """Monte-Carlo check of the two-sided concentration bound.

    Simulates ``trials`` independent m-shot means of Bernoulli(q) and
    compares the frequency of ``|mean - q| >= delta_gap / 2`` against
    ``2 exp(-delta_gap^2 m / 2)`` plus three binomial standard errors.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be a probability, got {q}")
    if trials < 1000:
        raise ValueError(f"need at least 1000 trials, got {trials}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    g = stream(seed, "hoeffding")
    means = g.binomial(m, q, size=trials) / m
    rate = float(np.mean(np.abs(means - q) >= delta_gap / 2.0))
    bound = 2.0 * math.exp(-(delta_gap**2) * m / 2.0)
    slack = 3.0 * math.sqrt(max(bound * (1.0 - bound), 0.0) / trials) + 1e-6
    return HoeffdingReport(
        q=q,
        m=m,
        delta_gap=delta_gap,
        trials=trials,
        empirical_rate=rate,
        bound=bound,
        slack=slack,
        passed=rate <= bound + slack,
    )
