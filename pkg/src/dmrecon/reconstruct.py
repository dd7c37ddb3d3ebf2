"""Assemble correlation records into density-matrix estimates.

Three direct estimators are provided. The weak estimator combines four Pauli
correlation pairs per element and is accurate only for small coupling. The
two exact estimators add flipped-pointer (Pi1) terms, or use them outright,
and reproduce the state at any coupling strength. A plain linear-inversion
tomography routine serves as the reference method.

Raw matrices are finalized by taking the Hermitian part and normalizing the
trace; no positivity projection or maximum-likelihood step is applied, so
finalized matrices may have negative eigenvalues and carry the positivity
flag unset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import qmath, states
from .correlations import CorrelationSet
from .protocol import CouplingConfig

METHOD_WEAK = "W"
METHOD_EXACT_I = "I"
METHOD_EXACT_II = "II"
METHOD_QST = "QST"

FINALIZE_TRACE_ATOL = 1e-9


@dataclass(frozen=True)
class ReconstructionResult:
    """A raw reconstructed matrix plus its finalized form and element errors.

    `element_errors[j-1, k-1]` is the propagated statistical error |delta
    rho_jk| of the finalized matrix (all zeros when built from exact
    correlations). `n_events` is the event count per correlation setting.
    """

    method: str
    raw: np.ndarray
    finalized: states.DensityMatrix
    element_errors: np.ndarray
    config: CouplingConfig | None
    n_events: int = 0


def finalize(raw: np.ndarray) -> states.DensityMatrix:
    """Hermitian part, then trace normalization. Positivity is not enforced."""
    h = qmath.hermitian_part(raw)
    tr = float(np.trace(h).real)
    if abs(tr) <= FINALIZE_TRACE_ATOL:
        raise ValueError(
            f"cannot normalize: Hermitian part has near-zero trace {tr:.3e}"
        )
    return states.DensityMatrix(h / tr, positivity_checked=False)


def _element_errors(re_err: np.ndarray, im_err: np.ndarray) -> np.ndarray:
    """Propagate per-element errors through the Hermitian part.

    Off-diagonal entries average two independent estimates (jk and kj), so
    their errors combine in quadrature with a factor 1/2; the diagonal keeps
    only its real part. The trace normalization is linearized at its ideal
    value of 1: dividing by the realized trace would mix its own sampling
    noise into every element and break the 1/theta^2 error scaling.
    """
    herm_re = 0.5 * np.sqrt(re_err**2 + re_err.T**2)
    np.fill_diagonal(herm_re, np.diag(re_err))
    herm_im = 0.5 * np.sqrt(im_err**2 + im_err.T**2)
    np.fill_diagonal(herm_im, 0.0)
    return np.sqrt(herm_re**2 + herm_im**2)


def _events(records) -> int:
    return max((rec.n_events for rec in records), default=0)


def reconstruct_weak(correls: CorrelationSet, cfg: CouplingConfig) -> ReconstructionResult:
    """Weak-approximation estimator from the four Pauli correlation pairs.

    Element (j, k) is n_ab * (<XX> - <YY>) + i n_ab * (<YX> + <XY>). The
    result approximates the state only for small coupling strength.
    """
    d = cfg.dim
    n = cfg.n_ab
    raw = np.zeros((d, d), dtype=complex)
    re_err = np.zeros((d, d))
    im_err = np.zeros((d, d))
    used = []
    for j in range(1, d + 1):
        for k in range(1, d + 1):
            xx = correls.get(j, k, "X", "X")
            yy = correls.get(j, k, "Y", "Y")
            yx = correls.get(j, k, "Y", "X")
            xy = correls.get(j, k, "X", "Y")
            used += [xx, yy, yx, xy]
            raw[j - 1, k - 1] = n * (xx.value - yy.value) + 1j * n * (xy.value + yx.value)
            re_err[j - 1, k - 1] = n * math.hypot(xx.std_error, yy.std_error)
            im_err[j - 1, k - 1] = n * math.hypot(yx.std_error, xy.std_error)
    return ReconstructionResult(
        method=METHOD_WEAK,
        raw=raw,
        finalized=finalize(raw),
        element_errors=_element_errors(re_err, im_err),
        config=cfg,
        n_events=_events(used),
    )


def reconstruct_exact_i(correls: CorrelationSet, cfg: CouplingConfig) -> ReconstructionResult:
    """Exact estimator: the weak combination plus tangent-weighted Pi1 terms.

    From exact correlations this reproduces the state at any coupling
    strength; the correction terms vanish as the strength goes to zero.
    """
    d = cfg.dim
    n = cfg.n_ab
    t_a, t_b = cfg.t_a, cfg.t_b
    raw = np.zeros((d, d), dtype=complex)
    re_err = np.zeros((d, d))
    im_err = np.zeros((d, d))
    used = []
    for j in range(1, d + 1):
        for k in range(1, d + 1):
            xx = correls.get(j, k, "X", "X")
            yy = correls.get(j, k, "Y", "Y")
            yx = correls.get(j, k, "Y", "X")
            xy = correls.get(j, k, "X", "Y")
            xp = correls.get(j, k, "X", "Pi1")
            px = correls.get(j, k, "Pi1", "X")
            yp = correls.get(j, k, "Y", "Pi1")
            pp = correls.get(j, k, "Pi1", "Pi1")
            used += [xx, yy, yx, xy, xp, px, yp, pp]
            re = n * (xx.value - yy.value) + 2 * n * (
                t_b * xp.value + t_a * px.value + 2 * t_a * t_b * pp.value
            )
            im = n * (xy.value + yx.value) + 2 * n * t_b * yp.value
            raw[j - 1, k - 1] = re + 1j * im
            re_err[j - 1, k - 1] = n * math.sqrt(
                xx.std_error**2
                + yy.std_error**2
                + 4 * t_b**2 * xp.std_error**2
                + 4 * t_a**2 * px.std_error**2
                + 16 * t_a**2 * t_b**2 * pp.std_error**2
            )
            im_err[j - 1, k - 1] = n * math.sqrt(
                yx.std_error**2 + xy.std_error**2 + 4 * t_b**2 * yp.std_error**2
            )
    return ReconstructionResult(
        method=METHOD_EXACT_I,
        raw=raw,
        finalized=finalize(raw),
        element_errors=_element_errors(re_err, im_err),
        config=cfg,
        n_events=_events(used),
    )


def reconstruct_exact_ii(correls: CorrelationSet, cfg: CouplingConfig) -> ReconstructionResult:
    """Exact estimator from only three observable pairs.

    Diagonal entries come from the double-flip probability <Pi1 Pi1>, which
    is independent of the final system outcome k: exact records use k = j,
    sampled records are averaged over k so every event contributes.
    """
    d = cfg.dim
    n = cfg.n_ab
    raw = np.zeros((d, d), dtype=complex)
    re_err = np.zeros((d, d))
    im_err = np.zeros((d, d))
    used = []
    for j in range(1, d + 1):
        recs = [correls.get(j, k, "Pi1", "Pi1") for k in range(1, d + 1)]
        used += recs
        if recs[0].source == "sampled":
            est = float(np.mean([r.value for r in recs]))
            n_ev = recs[0].n_events
            se = math.sqrt(max(est / d - est * est, 0.0) / n_ev)
        else:
            est = recs[j - 1].value
            se = 0.0
        raw[j - 1, j - 1] = 16 * n * n * est
        re_err[j - 1, j - 1] = 16 * n * n * se
        for k in range(1, d + 1):
            if k == j:
                continue
            yy = correls.get(j, k, "Y", "Y")
            xy = correls.get(j, k, "X", "Y")
            used += [yy, xy]
            raw[j - 1, k - 1] = -2 * n * yy.value + 2j * n * xy.value
            re_err[j - 1, k - 1] = 2 * n * yy.std_error
            im_err[j - 1, k - 1] = 2 * n * xy.std_error
    return ReconstructionResult(
        method=METHOD_EXACT_II,
        raw=raw,
        finalized=finalize(raw),
        element_errors=_element_errors(re_err, im_err),
        config=cfg,
        n_events=_events(used),
    )


# -- Reference tomography -----------------------------------------------------

QST_QUBIT_LABELS = ("H", "V", "D", "R")


def standard_projector_family(d: int) -> list[tuple[str, np.ndarray]]:
    """The d^2 projectors onto |a_j>, (|a_j>+|a_k>)/sqrt2, (|a_j>+i|a_k>)/sqrt2."""
    family: list[tuple[str, np.ndarray]] = []
    eye = np.eye(d, dtype=complex)
    for j in range(d):
        family.append((f"a{j + 1}", np.outer(eye[j], eye[j].conj())))
    for j in range(d):
        for k in range(j + 1, d):
            plus = (eye[j] + eye[k]) / np.sqrt(2)
            family.append((f"+_{j + 1}{k + 1}", np.outer(plus, plus.conj())))
    for j in range(d):
        for k in range(j + 1, d):
            imag = (eye[j] + 1j * eye[k]) / np.sqrt(2)
            family.append((f"i_{j + 1}{k + 1}", np.outer(imag, imag.conj())))
    return family


def born_probabilities(rho: states.DensityMatrix, projectors: Sequence[np.ndarray]) -> np.ndarray:
    """Tr(P rho) for each projector."""
    return np.array([float(np.trace(p @ rho.matrix).real) for p in projectors])


def _qst_qubit(probabilities: Mapping[str, float]) -> np.ndarray:
    missing = [lbl for lbl in QST_QUBIT_LABELS if lbl not in probabilities]
    if missing:
        raise ValueError(f"qubit tomography needs probabilities for {missing}")
    p_h = probabilities["H"]
    p_v = probabilities["V"]
    # |D> = (|H>+|V>)/sqrt2 gives p_D = 1/2 + Re rho_12;
    # |R> = (|H>-i|V>)/sqrt2 gives p_R = 1/2 + Im rho_12.
    off = (probabilities["D"] - 0.5) + 1j * (probabilities["R"] - 0.5)
    return np.array([[p_h, off], [off.conjugate(), p_v]], dtype=complex)


def qst_linear_inversion(projector_expectations, d: int) -> ReconstructionResult:
    """Tomography by inverting Born probabilities of d^2 projectors.

    For d = 2 pass a mapping with keys H, V, D, R; for general d pass an
    iterable of (projector, probability) pairs whose vectorized projectors
    are linearly independent.
    """
    if isinstance(projector_expectations, Mapping):
        if d != 2:
            raise ValueError("labelled H/V/D/R probabilities only apply at d=2")
        raw = _qst_qubit(projector_expectations)
    else:
        pairs = list(projector_expectations)
        if len(pairs) < d * d:
            raise ValueError(f"need at least {d * d} projectors for d={d}, got {len(pairs)}")
        a = np.stack([np.asarray(p, dtype=complex).T.reshape(-1) for p, _ in pairs])
        p_vec = np.array([float(prob) for _, prob in pairs])
        sv = np.linalg.svd(a, compute_uv=False)
        if sv[-1] < 1e-10 * sv[0] or len(sv) < d * d:
            raise ValueError("projector set is rank-deficient: not informationally complete")
        x, *_ = np.linalg.lstsq(a, p_vec, rcond=None)
        raw = x.reshape(d, d)
    return ReconstructionResult(
        method=METHOD_QST,
        raw=raw,
        finalized=finalize(raw),
        element_errors=np.zeros((d, d)),
        config=None,
        n_events=0,
    )
