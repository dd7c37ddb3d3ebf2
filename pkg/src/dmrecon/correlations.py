"""Pointer correlation values <O_A O_B>_{j,k}, three ways.

Each correlation is the expectation of
Pi_{a_k} (x) O_A (x) O_B on the state evolved with the j-th coupling.
Three evaluation paths are provided:

  exact     trace against the numerically evolved tripartite state
  analytic  closed-form expressions in the entries of rho
  sampled   finite-N multinomial draw from the joint outcome distribution

The exact and analytic paths are independent implementations and must agree;
their agreement cross-validates both the evolution code and the closed forms.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from . import protocol, states
from .protocol import CouplingConfig, OutcomeTable

ObsPair = tuple[str, str]

# Observable pairs consumed by each estimator.
PAIRS_WEAK: tuple[ObsPair, ...] = (("X", "X"), ("Y", "Y"), ("Y", "X"), ("X", "Y"))
PAIRS_EXACT_I: tuple[ObsPair, ...] = PAIRS_WEAK + (
    ("X", "Pi1"),
    ("Pi1", "X"),
    ("Y", "Pi1"),
    ("Pi1", "Pi1"),
)
PAIRS_EXACT_II: tuple[ObsPair, ...] = (("Pi1", "Pi1"), ("Y", "Y"), ("X", "Y"))

SUPPORTED_PAIRS: tuple[ObsPair, ...] = PAIRS_EXACT_I


def derive_seed(root: int, *parts) -> int:
    """Stable 64-bit seed from a root seed and arbitrary coordinates."""
    payload = "::".join([str(root), *map(str, parts)]).encode()
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "little")


@dataclass(frozen=True)
class CorrelationRecord:
    """One correlation value with its provenance.

    `counts` is the 2 x 2 outcome-count table (pointer A outcome x pointer B
    outcome) behind a sampled value; None for exact and analytic sources.
    """

    j: int
    k: int
    obs_a: str
    obs_b: str
    value: float
    std_error: float = 0.0
    n_events: int = 0
    source: str = "exact"
    counts: np.ndarray | None = None

    def __post_init__(self):
        if self.source not in ("exact", "analytic", "sampled"):
            raise ValueError(f"unknown source '{self.source}'")
        if (self.std_error > 0.0) and self.source != "sampled":
            raise ValueError("only sampled records carry a standard error")
        if self.std_error < 0.0:
            raise ValueError("standard error must be nonnegative")


class CorrelationSet:
    """Correlation records keyed by (j, k, obs_a, obs_b)."""

    def __init__(self, records: list[CorrelationRecord] | None = None):
        self._records: dict[tuple[int, int, str, str], CorrelationRecord] = {}
        for rec in records or []:
            self.add(rec)

    def add(self, rec: CorrelationRecord) -> None:
        self._records[(rec.j, rec.k, rec.obs_a, rec.obs_b)] = rec

    def get(self, j: int, k: int, obs_a: str, obs_b: str) -> CorrelationRecord:
        key = (j, k, obs_a, obs_b)
        if key not in self._records:
            raise ValueError(
                f"missing correlation <{obs_a}_A {obs_b}_B> for (j={j}, k={k})"
            )
        return self._records[key]

    def value(self, j: int, k: int, obs_a: str, obs_b: str) -> float:
        return self.get(j, k, obs_a, obs_b).value

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self):
        return iter(self._records.values())


def correlation_table(
    rho: states.DensityMatrix, j: int, obs_a: str, obs_b: str, cfg: CouplingConfig
) -> OutcomeTable:
    """Joint outcome table for the j-th coupling and one observable pair."""
    sigma = protocol.evolve(rho, j, cfg)
    settings = (protocol.pointer_setting(obs_a), protocol.pointer_setting(obs_b))
    return protocol.outcome_probabilities(sigma, settings, j=j)


def records_from_table(table: OutcomeTable) -> list[CorrelationRecord]:
    """Exact correlation records for every k from one outcome table."""
    eig_a = table.setting_a.eigenvalues
    eig_b = table.setting_b.eigenvalues
    values = np.einsum("x,y,xyk->k", eig_a, eig_b, table.probs)
    return [
        CorrelationRecord(
            j=table.j,
            k=k,
            obs_a=table.setting_a.observable,
            obs_b=table.setting_b.observable,
            value=float(values[k - 1]),
            source="exact",
        )
        for k in range(1, table.dim + 1)
    ]


def exact_correlation(
    rho: states.DensityMatrix,
    j: int,
    k: int,
    obs_a: str,
    obs_b: str,
    cfg: CouplingConfig,
) -> CorrelationRecord:
    """Correlation from the trace against the evolved tripartite state."""
    table = correlation_table(rho, j, obs_a, obs_b, cfg)
    return records_from_table(table)[k - 1]


def analytic_correlation(
    rho: states.DensityMatrix,
    j: int,
    k: int,
    obs_a: str,
    obs_b: str,
    cfg: CouplingConfig,
) -> CorrelationRecord:
    """Correlation from the closed-form expression in the entries of rho.

    Supported observable pairs: XX, XY, YX, YY, Pi1-X, X-Pi1, Y-Pi1, Pi1-Pi1.
    With s = sin(theta), c = cos(theta) per pointer and n = d/(4 s_A s_B),
    each pair reduces to a short combination of row sums of rho.
    """
    pair = (obs_a, obs_b)
    if pair not in SUPPORTED_PAIRS:
        raise ValueError(
            f"no closed form for <{obs_a}_A {obs_b}_B>; supported pairs: "
            + ", ".join(f"{a}-{b}" for a, b in SUPPORTED_PAIRS)
        )
    d = cfg.dim
    if not (1 <= j <= d and 1 <= k <= d):
        raise ValueError(f"indices (j={j}, k={k}) out of range 1..{d}")
    m = rho.matrix
    n = cfg.n_ab
    s_a, c_a = math.sin(cfg.theta_a), math.cos(cfg.theta_a)
    s_b, c_b = math.sin(cfg.theta_b), math.cos(cfg.theta_b)
    delta = 1.0 if j == k else 0.0
    row = m[j - 1, :]
    sum_re = float(row.real.sum())
    sum_im = float(row.imag.sum())
    p_jj = float(m[j - 1, j - 1].real)
    sum_re_off = sum_re - p_jj
    sum_im_off = sum_im - float(m[j - 1, j - 1].imag)
    re_jk = float(m[j - 1, k - 1].real)
    im_jk = float(m[j - 1, k - 1].imag)

    if pair == ("X", "X"):
        value = ((1.0 - delta) * re_jk + delta * sum_re_off + 2.0 * c_a * delta * re_jk) / (
            2.0 * n
        ) + (c_b - 1.0) * (sum_re_off + c_a * p_jj) / (d * n)
    elif pair == ("X", "Y"):
        value = (im_jk - delta * sum_im_off) / (2.0 * n)
    elif pair == ("Y", "X"):
        value = (
            im_jk + delta * sum_im_off + 2.0 * (c_b - 1.0) * sum_im / d
        ) / (2.0 * n)
    elif pair == ("Y", "Y"):
        value = (-re_jk + delta * sum_re) / (2.0 * n)
    elif pair == ("Pi1", "X"):
        value = delta * s_a * re_jk / (2.0 * n) + s_a * (c_b - 1.0) * p_jj / (2.0 * d * n)
    elif pair == ("X", "Pi1"):
        value = s_b * sum_re / (2.0 * d * n) + s_b * (c_a - 1.0) * p_jj / (2.0 * d * n)
    elif pair == ("Y", "Pi1"):
        value = s_b * sum_im / (2.0 * d * n)
    else:  # ("Pi1", "Pi1"), independent of k
        value = p_jj / (16.0 * n * n)

    return CorrelationRecord(
        j=j, k=k, obs_a=obs_a, obs_b=obs_b, value=value, source="analytic"
    )


def sample_counts(table: OutcomeTable, n: int, seed: int) -> np.ndarray:
    """Draw n events from the joint table; returns integer counts shaped (2, 2, d).

    One multinomial draw over the flattened table with a counter-based Philox
    generator keyed per setting: reproducible across runs and workers, with
    cost independent of n.
    """
    if n < 1:
        raise ValueError("need at least one event")
    flat = table.probs.reshape(-1)
    rng = np.random.Generator(np.random.Philox(seed))
    counts = rng.multinomial(n, flat / flat.sum())
    return counts.reshape(table.probs.shape)


def sampled_records_from_counts(
    table: OutcomeTable, counts: np.ndarray, n: int
) -> list[CorrelationRecord]:
    """Per-k correlation estimates and plug-in standard errors from counts."""
    eig_a = table.setting_a.eigenvalues
    eig_b = table.setting_b.eigenvalues
    w = np.multiply.outer(eig_a, eig_b)  # (2, 2) outcome weights
    freq = counts / n
    est = np.einsum("xy,xyk->k", w, freq)
    second = np.einsum("xy,xyk->k", w * w, freq)
    var = np.maximum(second - est * est, 0.0) / n
    se = np.sqrt(var)
    return [
        CorrelationRecord(
            j=table.j,
            k=k,
            obs_a=table.setting_a.observable,
            obs_b=table.setting_b.observable,
            value=float(est[k - 1]),
            std_error=float(se[k - 1]),
            n_events=n,
            source="sampled",
            counts=counts[:, :, k - 1].copy(),
        )
        for k in range(1, table.dim + 1)
    ]


def sample_correlation(
    rho: states.DensityMatrix,
    j: int,
    obs_a: str,
    obs_b: str,
    cfg: CouplingConfig,
    n: int,
    rng_seed: int,
) -> list[CorrelationRecord]:
    """Sampled correlation records for all k from one n-event run of setting (j, pair)."""
    table = correlation_table(rho, j, obs_a, obs_b, cfg)
    counts = sample_counts(table, n, rng_seed)
    return sampled_records_from_counts(table, counts, n)


def correlation_set_from_tables(
    tables: dict[tuple[int, ObsPair], OutcomeTable],
    sampled: bool = False,
    n: int = 0,
    root_seed: int = 0,
) -> CorrelationSet:
    """Assemble a CorrelationSet from precomputed outcome tables.

    In sampled mode each (j, pair) table gets its own n-event draw, with a
    seed derived from the root seed and the setting coordinates.
    """
    out = CorrelationSet()
    for (j, pair), table in tables.items():
        if sampled:
            seed = derive_seed(root_seed, "corr", j, pair[0], pair[1])
            counts = sample_counts(table, n, seed)
            recs = sampled_records_from_counts(table, counts, n)
        else:
            recs = records_from_table(table)
        for rec in recs:
            out.add(rec)
    return out


def build_tables(
    rho: states.DensityMatrix,
    cfg: CouplingConfig,
    pairs: tuple[ObsPair, ...],
) -> dict[tuple[int, ObsPair], OutcomeTable]:
    """Outcome tables for every coupled index j and requested observable pair.

    The evolved state is computed once per j and shared across pairs.
    """
    out: dict[tuple[int, ObsPair], OutcomeTable] = {}
    for j in range(1, cfg.dim + 1):
        sigma = protocol.evolve(rho, j, cfg)
        for pair in pairs:
            settings = (protocol.pointer_setting(pair[0]), protocol.pointer_setting(pair[1]))
            out[(j, pair)] = protocol.outcome_probabilities(sigma, settings, j=j)
    return out


def exact_correlation_set(
    rho: states.DensityMatrix, cfg: CouplingConfig, pairs: tuple[ObsPair, ...]
) -> CorrelationSet:
    """All (j, k) exact correlations for the requested pairs."""
    return correlation_set_from_tables(build_tables(rho, cfg, pairs))


def sampled_correlation_set(
    rho: states.DensityMatrix,
    cfg: CouplingConfig,
    pairs: tuple[ObsPair, ...],
    n: int,
    root_seed: int,
) -> CorrelationSet:
    """All (j, k) sampled correlations, n events per (j, pair) setting."""
    return correlation_set_from_tables(
        build_tables(rho, cfg, pairs), sampled=True, n=n, root_seed=root_seed
    )
