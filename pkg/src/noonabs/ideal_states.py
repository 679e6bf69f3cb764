"""
N-photon absorption of spectrally ideal states of light.

The n-photon absorption probability is ``P_n = <a^dag^n a^n> / <a^dag a>^n``
(proportionality constant fixed to one). For the two-mode N00N state the
annihilation operator is ``a = a1 + a2``.

Closed forms live in :func:`absorption_probability`; :func:`brute_force_moment`
recomputes the normally ordered moments by applying ladder operators to
truncated Fock-space amplitudes and serves as the independent check.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, OrderError, TruncationError

KINDS = ("thermal", "coherent", "fock", "noon")
_LOG_SPACE_ABOVE = 12


@dataclass(frozen=True)
class IdealState:
    """``param`` is the mean photon number for thermal/coherent, N for fock/noon."""

    kind: str
    param: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown state kind {self.kind!r}")
        if not self.param > 0:
            raise DomainError("state parameter must be positive")
        if self.kind in ("fock", "noon"):
            if int(self.param) != self.param:
                raise DomainError(f"{self.kind} photon number must be an integer")
            object.__setattr__(self, "param", int(self.param))


@dataclass(frozen=True)
class MomentReport:
    n: int
    normally_ordered_moment: float
    mean: float
    probability: float


def _falling(N, n):
    """N! / (N - n)!"""
    if N > _LOG_SPACE_ABOVE:
        return math.exp(math.lgamma(N + 1) - math.lgamma(N - n + 1))
    return math.factorial(N) / math.factorial(N - n)


def _ratio(moment_log, mean, n):
    return math.exp(moment_log - n * math.log(mean))


def absorption_probability(state, n):
    """Closed-form :class:`MomentReport` for absorption order ``n``."""
    if int(n) != n or n < 1:
        raise DomainError("absorption order must be a positive integer")
    n = int(n)
    kind, p = state.kind, state.param
    weight = 1.0  # exact factor kept out of log space so noon/fock stays exactly 2
    if kind in ("fock", "noon") and n > p:
        raise OrderError(f"order {n} exceeds photon number {p} of the {kind} state")

    if kind == "coherent":
        mean = float(p)
        log_m = n * math.log(mean)
    elif kind == "thermal":
        mean = float(p)
        log_m = math.lgamma(n + 1) + n * math.log(mean)
    elif kind == "fock":
        mean = float(p)
        log_m = math.log(_falling(p, n))
    else:
        if p == 1:
            # <a1^dag a2> cross terms survive only for a single photon
            mean = 2.0
            log_m = math.log(2.0)
        else:
            mean = float(p)
            log_m = math.log(_falling(p, n))
            if n == p:
                weight = 2.0

    if n > _LOG_SPACE_ABOVE or (kind in ("fock", "noon") and p > _LOG_SPACE_ABOVE):
        prob = weight * _ratio(log_m, mean, n)
        moment = weight * math.exp(log_m)
    else:
        moment = _exact_moment(kind, p, n, mean)
        prob = moment / mean**n
    return MomentReport(n=n, normally_ordered_moment=moment, mean=mean, probability=prob)


def _exact_moment(kind, p, n, mean):
    if kind == "coherent":
        return mean**n
    if kind == "thermal":
        return math.factorial(n) * mean**n
    if kind == "fock":
        return float(math.factorial(p) // math.factorial(p - n))
    if p == 1:
        return 2.0
    m = math.factorial(p) // math.factorial(p - n)
    return float(2 * m if n == p else m)


def _lower(psi, axis=0):
    """Apply the annihilation operator along ``axis`` of a Fock amplitude array."""
    psi = np.moveaxis(psi, axis, 0)
    out = np.zeros_like(psi)
    k = np.sqrt(np.arange(1, psi.shape[0]))
    out[:-1] = (k.reshape((-1,) + (1,) * (psi.ndim - 1))) * psi[1:]
    return np.moveaxis(out, 0, axis)


def _lower_n(psi, n, modes):
    for _ in range(n):
        psi = sum(_lower(psi, ax) for ax in modes)
    return psi


def default_truncation(state, n):
    if state.kind in ("fock", "noon"):
        return state.param + 1
    nbar = state.param
    if state.kind == "thermal":
        # tail mass (nbar/(1+nbar))^T below 1e-30
        return int(math.ceil(30 * math.log(10) / math.log1p(1.0 / nbar))) + 4 * n + 10
    return int(math.ceil(nbar + 40 * math.sqrt(nbar) + 60)) + 4 * n


def _tail_mass(state, truncation):
    nbar = state.param
    if state.kind == "thermal":
        return (nbar / (1.0 + nbar)) ** truncation
    # Poisson upper tail, bounded by the leftover of the normalized weights
    j = np.arange(truncation)
    logw = -nbar + j * math.log(nbar) - np.array([math.lgamma(v + 1) for v in j])
    return max(0.0, 1.0 - float(np.exp(logw).sum()))


def brute_force_moment(state, n, truncation=None):
    """``<a^dag^n a^n>`` by explicit ladder action in a truncated Fock basis.

    ``truncation`` is the number of retained Fock levels per mode.

    Raises
    ------
    TruncationError
        If the discarded thermal/coherent probability mass exceeds 1e-10, or a
        Fock/N00N state does not fit.
    """
    if truncation is None:
        truncation = default_truncation(state, n)
    kind, p = state.kind, state.param
    if kind in ("fock", "noon"):
        if truncation <= p:
            raise TruncationError(f"truncation {truncation} cannot hold {p} photons")
        if n > p:
            raise OrderError(f"order {n} exceeds photon number {p}")
    else:
        tail = _tail_mass(state, truncation)
        if tail >= 1e-10:
            raise TruncationError(f"neglected tail mass {tail:.2e} >= 1e-10")

    if kind == "fock":
        psi = np.zeros(truncation)
        psi[p] = 1.0
        phi = _lower_n(psi, n, (0,))
        return float(phi @ phi)
    if kind == "noon":
        psi = np.zeros((truncation, truncation))
        psi[p, 0] = psi[0, p] = 1.0 / math.sqrt(2.0)
        phi = _lower_n(psi, n, (0, 1))
        return float(np.sum(phi * phi))
    if kind == "coherent":
        j = np.arange(truncation)
        log_amp = -p / 2 + j * 0.5 * math.log(p) - 0.5 * np.array([math.lgamma(v + 1) for v in j])
        psi = np.exp(log_amp)
        phi = _lower_n(psi, n, (0,))
        return float(phi @ phi)
    # thermal: diagonal mixture of number states, each lowered separately
    nbar = p
    j = np.arange(truncation)
    weights = np.exp(j * math.log(nbar) - (j + 1) * math.log1p(nbar))
    basis = np.eye(truncation)
    lowered = _lower_n(basis, n, (0,))
    return float(weights @ np.sum(lowered * lowered, axis=0))


def brute_force_mean(state, truncation=None):
    return brute_force_moment(state, 1, truncation)


def scaling_table(max_n):
    """Rows ``(N, thermal, coherent, fock, noon)`` of N-th order absorption.

    Each entry is P_N for the state with N photons (mean N for thermal and
    coherent), relative to the coherent state, which is 1 for every N.
    """
    if int(max_n) != max_n or not 1 <= max_n <= 20:
        raise DomainError("max_n must be an integer in [1, 20]")
    rows = []
    for N in range(1, int(max_n) + 1):
        coh = absorption_probability(IdealState("coherent", N), N).probability
        row = [N]
        for kind in KINDS:
            row.append(absorption_probability(IdealState(kind, N), N).probability / coh)
        rows.append(tuple(row))
    return rows
