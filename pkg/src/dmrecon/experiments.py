"""Scenario runner: purity, strength and statistical-error sweeps.

Every run is deterministic: per-point seeds are derived from the root seed
and the scenario coordinates, and rows are sorted before they are written,
so repeated runs (or parallel ones) produce identical output.

The reference a reconstruction is compared against is, by default, the
programmed input state itself, so the comparison carries no reference noise.
A `reference = qst` mode instead compares against a sampled linear-inversion
tomography estimate, mirroring a real experiment's protocol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import correlations, metrics, protocol, qmath, reconstruct, states
from .correlations import derive_seed
from .protocol import CouplingConfig, OutcomeTable, PointerSetting

KINDS = ("purity_sweep", "strength_sweep", "error_sweep", "single")
METHODS = ("W", "I", "II", "QST")
SOURCES = ("sampled", "exact")
REFERENCES = ("truth", "qst")

DEFAULT_N_EVENTS = 10_000
DEFAULT_N_SEEDS = 50
DEFAULT_PURITY_POINTS = 9
DEFAULT_THETA_POINTS = 12
THETA_MIN_DEFAULT = 0.05

EXPECTATION_SEED = -1  # marks rows computed from exact correlations

_PAIRS_BY_METHOD = {
    "W": correlations.PAIRS_WEAK,
    "I": correlations.PAIRS_EXACT_I,
    "II": correlations.PAIRS_EXACT_II,
}
_RECONSTRUCTORS = {
    "W": reconstruct.reconstruct_weak,
    "I": reconstruct.reconstruct_exact_i,
    "II": reconstruct.reconstruct_exact_ii,
}


def default_theta_grid() -> tuple[float, ...]:
    """Log-spaced coupling strengths from the weak regime up to pi/2."""
    return tuple(
        float(t)
        for t in np.geomspace(THETA_MIN_DEFAULT, math.pi / 2, DEFAULT_THETA_POINTS)
    )


def default_purity_grid() -> tuple[float, ...]:
    return tuple(float(p) for p in np.linspace(0.0, 1.0, DEFAULT_PURITY_POINTS))


@dataclass(frozen=True)
class BiasModel:
    """Systematic imperfections of the pointer measurements.

    `pointer_rotation_epsilon` tilts every pointer projector by a small
    rotation about the pointer Y axis. `per_projector_efficiency` scales the
    counts of one designated projector (by convention the first-listed
    outcome of pointer A) before renormalization.
    """

    pointer_rotation_epsilon: float = 0.0
    per_projector_efficiency: float = 1.0

    def __post_init__(self):
        if abs(self.pointer_rotation_epsilon) > 0.1:
            raise ValueError("pointer rotation bias limited to |epsilon| <= 0.1 rad")
        if not 0.9 <= self.per_projector_efficiency <= 1.1:
            raise ValueError("projector efficiency limited to [0.9, 1.1]")

    @property
    def is_neutral(self) -> bool:
        return self.pointer_rotation_epsilon == 0.0 and self.per_projector_efficiency == 1.0


@dataclass(frozen=True)
class Scenario:
    """One experiment description; field defaults match the standard sweeps."""

    scenario_id: str
    kind: str
    input_state: str = "pure:D"
    d: int = 2
    theta_list: tuple[float, ...] = ()
    n_events: int = DEFAULT_N_EVENTS
    seeds: tuple[int, ...] = tuple(range(DEFAULT_N_SEEDS))
    bias: BiasModel | None = None
    methods: tuple[str, ...] = ("W", "I", "II")
    source: str = "sampled"
    reference: str = "truth"
    purity_grid: tuple[float, ...] = field(default_factory=default_purity_grid)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown scenario kind '{self.kind}'")
        if not self.scenario_id:
            raise ValueError("scenario id must be nonempty")
        thetas = self.theta_list
        if not thetas:
            thetas = (math.pi / 2,) if self.kind == "purity_sweep" else default_theta_grid()
            object.__setattr__(self, "theta_list", thetas)
        for th in thetas:
            if not 0.0 < th <= math.pi / 2 + 1e-12:
                raise ValueError(f"theta={th} outside (0, pi/2]")
        if self.kind == "purity_sweep" and len(thetas) != 1:
            raise ValueError("purity sweeps use a single coupling strength")
        if not self.seeds:
            raise ValueError("need at least one seed")
        if self.n_events < 1:
            raise ValueError("n_events must be >= 1")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ValueError(f"unknown methods {unknown}")
        if not self.methods:
            raise ValueError("need at least one method")
        if self.source not in SOURCES:
            raise ValueError(f"source must be one of {SOURCES}")
        if self.reference not in REFERENCES:
            raise ValueError(f"reference must be one of {REFERENCES}")
        for p in self.purity_grid:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"purity point {p} outside [0, 1]")


@dataclass(frozen=True)
class ResultRow:
    """One reconstruction outcome; maps 1:1 onto a CSV output row.

    `delta_rho` is the propagated statistical error; `delta_rho_measured`
    (not part of the CSV schema) is the realized deviation of this seed's
    finalized matrix from the estimator's exact-correlation expectation.
    """

    scenario_id: str
    kind: str
    method: str
    d: int
    theta_a: float
    theta_b: float
    purity_p: float
    n_events: int
    seed: int
    trace_distance: float
    delta_rho: float
    bound: float
    bias_epsilon: float
    bias_efficiency: float
    delta_rho_measured: float = float("nan")


def apply_bias(
    settings: tuple[PointerSetting, PointerSetting], bias: BiasModel
) -> tuple[PointerSetting, PointerSetting]:
    """Rotate every projector of both settings by the bias angle about Y."""
    eps = bias.pointer_rotation_epsilon
    if eps == 0.0:
        return settings
    r = protocol.pointer_rotation(eps)
    out = []
    for setting in settings:
        rotated = tuple(
            (eig, r @ p @ r.conj().T) for eig, p in setting.projectors
        )
        out.append(PointerSetting(observable=setting.observable, projectors=rotated))
    return (out[0], out[1])


def bias_outcome_table(table: OutcomeTable, bias: BiasModel) -> OutcomeTable:
    """Scale the designated projector's probability rows, then renormalize."""
    eff = bias.per_projector_efficiency
    if eff == 1.0:
        return table
    probs = table.probs.copy()
    probs[0, :, :] *= eff
    probs /= probs.sum()
    return OutcomeTable(
        j=table.j, setting_a=table.setting_a, setting_b=table.setting_b, probs=probs
    )


def build_tables(
    rho: states.DensityMatrix,
    cfg: CouplingConfig,
    pairs: tuple[correlations.ObsPair, ...],
    bias: BiasModel | None = None,
) -> dict[tuple[int, correlations.ObsPair], OutcomeTable]:
    """Outcome tables for all (j, pair) settings, with optional bias applied."""
    if bias is None or bias.is_neutral:
        return correlations.build_tables(rho, cfg, pairs)
    out: dict[tuple[int, correlations.ObsPair], OutcomeTable] = {}
    for j in range(1, cfg.dim + 1):
        sigma = protocol.evolve(rho, j, cfg)
        for pair in pairs:
            settings = apply_bias(
                (protocol.pointer_setting(pair[0]), protocol.pointer_setting(pair[1])),
                bias,
            )
            table = protocol.outcome_probabilities(sigma, settings, j=j)
            out[(j, pair)] = bias_outcome_table(table, bias)
    return out


def _pairs_for(methods: tuple[str, ...]) -> tuple[correlations.ObsPair, ...]:
    seen: list[correlations.ObsPair] = []
    for m in methods:
        for pair in _PAIRS_BY_METHOD.get(m, ()):
            if pair not in seen:
                seen.append(pair)
    return tuple(seen)


def _qst_reconstruction(
    rho: states.DensityMatrix, d: int, n: int, seed: int | None
) -> reconstruct.ReconstructionResult:
    """Linear-inversion tomography; sampled Born probabilities when seeded."""
    family = reconstruct.standard_projector_family(d)
    projs = [p for _, p in family]
    p_exact = reconstruct.born_probabilities(rho, projs)
    if seed is None:
        probs = p_exact
    else:
        rng = np.random.Generator(np.random.Philox(seed))
        probs = rng.binomial(n, np.clip(p_exact, 0.0, 1.0)) / n
    return reconstruct.qst_linear_inversion(list(zip(projs, probs)), d)


def run_point(
    scn: Scenario,
    rho: states.DensityMatrix,
    theta: float,
    purity_p: float,
    root_seed: int,
    point_key: tuple,
) -> list[ResultRow]:
    """All rows for one (state, theta) grid point of a scenario."""
    cfg = CouplingConfig(scn.d, theta, theta)
    direct_methods = tuple(m for m in scn.methods if m in _PAIRS_BY_METHOD)
    pairs = _pairs_for(direct_methods)
    tables = build_tables(rho, cfg, pairs, scn.bias) if pairs else {}

    # Expected-value reconstructions, from exact (possibly biased) correlations.
    exact_set = correlations.correlation_set_from_tables(tables) if pairs else None
    expected: dict[str, reconstruct.ReconstructionResult | None] = {}
    for m in direct_methods:
        try:
            expected[m] = _RECONSTRUCTORS[m](exact_set, cfg)
        except ValueError:
            expected[m] = None  # degenerate point, e.g. weak estimator at p = 0
    if "QST" in scn.methods:
        expected["QST"] = _qst_reconstruction(rho, scn.d, scn.n_events, None)

    def sampled_qst(seed: int):
        try:
            return _qst_reconstruction(rho, scn.d, scn.n_events, seed)
        except ValueError:
            return None

    bias_eps = scn.bias.pointer_rotation_epsilon if scn.bias else 0.0
    bias_eff = scn.bias.per_projector_efficiency if scn.bias else 1.0

    def reference_state(seed: int | None) -> states.DensityMatrix | None:
        if scn.reference == "truth":
            return rho
        qseed = None if seed is None else derive_seed(root_seed, *point_key, seed, "qst-ref")
        try:
            return _qst_reconstruction(rho, scn.d, scn.n_events, qseed).finalized
        except ValueError:
            return None

    def bound_for(method: str) -> float:
        if method not in _PAIRS_BY_METHOD:
            return float("nan")
        try:
            return metrics.error_lower_bound(method, scn.d, theta, scn.n_events).bound
        except ValueError:
            return float("nan")

    def make_row(method: str, seed: int, result, reference) -> ResultRow:
        if result is None:
            # The raw matrix could not be normalized (zero signal, e.g. the
            # double-flip counts at small theta): no state estimate exists
            # and the statistical error is unbounded.
            t_dist = float("nan")
            d_rho = float("inf")
            measured = float("nan")
        else:
            t_dist = (
                qmath.trace_distance(result.finalized.matrix, reference.matrix)
                if reference is not None
                else float("nan")
            )
            d_rho = metrics.mean_square_error(result.element_errors)
            exp = expected.get(method)
            measured = (
                float(np.linalg.norm(result.finalized.matrix - exp.finalized.matrix))
                if exp is not None
                else float("nan")
            )
        return ResultRow(
            scenario_id=scn.scenario_id,
            kind=scn.kind,
            method=method,
            d=scn.d,
            theta_a=theta,
            theta_b=theta,
            purity_p=purity_p,
            n_events=scn.n_events,
            seed=seed,
            trace_distance=t_dist,
            delta_rho=d_rho,
            bound=bound_for(method),
            bias_epsilon=bias_eps,
            bias_efficiency=bias_eff,
            delta_rho_measured=measured,
        )

    rows: list[ResultRow] = []

    # Expectation rows double as the exact-mode data and the theoretical curve.
    ref_exact = reference_state(None)
    for m in scn.methods:
        rows.append(make_row(m, EXPECTATION_SEED, expected.get(m), ref_exact))

    if scn.source == "sampled":
        for seed in scn.seeds:
            sample_root = derive_seed(root_seed, *point_key, seed)
            sampled_set = (
                correlations.correlation_set_from_tables(
                    tables, sampled=True, n=scn.n_events, root_seed=sample_root
                )
                if pairs
                else None
            )
            ref = reference_state(seed)
            for m in scn.methods:
                if m == "QST":
                    result = sampled_qst(derive_seed(sample_root, "qst-method"))
                else:
                    try:
                        result = _RECONSTRUCTORS[m](sampled_set, cfg)
                    except ValueError:
                        result = None
                rows.append(make_row(m, seed, result, ref))
    return rows


def run_purity_sweep(scn: Scenario, root_seed: int = 0) -> list[ResultRow]:
    """Reconstruction accuracy across a grid of input purities at fixed theta."""
    if scn.kind != "purity_sweep":
        raise ValueError(f"expected a purity_sweep scenario, got '{scn.kind}'")
    theta = scn.theta_list[0]
    if not scn.input_state.startswith("pure:"):
        raise ValueError("purity sweeps need a pure input spec for the family state")
    psi = states.named_ket(scn.input_state[len("pure:"):], scn.d)
    rows: list[ResultRow] = []
    for p in scn.purity_grid:
        rho = states.purity_family(p, psi)
        rows += run_point(scn, rho, theta, p, root_seed, (scn.scenario_id, "p", p))
    return sort_rows(rows)


def run_strength_sweep(scn: Scenario, root_seed: int = 0) -> list[ResultRow]:
    """Reconstruction accuracy across coupling strengths for one input state."""
    if scn.kind != "strength_sweep":
        raise ValueError(f"expected a strength_sweep scenario, got '{scn.kind}'")
    rho = states.parse_state_spec(scn.input_state, scn.d)
    p = states.purity(rho)
    rows: list[ResultRow] = []
    for theta in scn.theta_list:
        rows += run_point(scn, rho, theta, p, root_seed, (scn.scenario_id, "th", theta))
    return sort_rows(rows)


def run_error_sweep(scn: Scenario, root_seed: int = 0) -> list[ResultRow]:
    """Statistical errors across coupling strengths, with the theoretical floor."""
    if scn.kind != "error_sweep":
        raise ValueError(f"expected an error_sweep scenario, got '{scn.kind}'")
    rho = states.parse_state_spec(scn.input_state, scn.d)
    p = states.purity(rho)
    rows: list[ResultRow] = []
    for theta in scn.theta_list:
        rows += run_point(scn, rho, theta, p, root_seed, (scn.scenario_id, "th", theta))
    return sort_rows(rows)


def run_single(scn: Scenario, root_seed: int = 0) -> list[ResultRow]:
    """One state, the listed strengths, no sweep semantics."""
    if scn.kind != "single":
        raise ValueError(f"expected a single scenario, got '{scn.kind}'")
    rho = states.parse_state_spec(scn.input_state, scn.d)
    p = states.purity(rho)
    rows: list[ResultRow] = []
    for theta in scn.theta_list:
        rows += run_point(scn, rho, theta, p, root_seed, (scn.scenario_id, "th", theta))
    return sort_rows(rows)


_RUNNERS = {
    "purity_sweep": run_purity_sweep,
    "strength_sweep": run_strength_sweep,
    "error_sweep": run_error_sweep,
    "single": run_single,
}


def run_scenario(scn: Scenario, root_seed: int = 0) -> list[ResultRow]:
    return _RUNNERS[scn.kind](scn, root_seed)


def sort_rows(rows: list[ResultRow]) -> list[ResultRow]:
    """Canonical row order, so parallel execution cannot change the artifact."""
    return sorted(
        rows,
        key=lambda r: (r.scenario_id, r.kind, r.theta_a, r.purity_p, r.method, r.seed),
    )


def with_bias(scn: Scenario, bias: BiasModel | None) -> Scenario:
    """Copy of a scenario with a different bias model."""
    return replace(scn, bias=bias)
