"""Config parsing, matrix serialization and CSV emission.

The config format is flat key-value text with one section per scenario:

    [global]
    root_seed = 7
    output_dir = results

    [scenario fig4-top]
    kind = strength_sweep
    state = pure:D
    d = 2
    theta = 0.05 0.1 0.5 1.5707963267948966
    n_events = 10000
    n_seeds = 50
    methods = W I II
    source = sampled

Whole files validate before anything runs; every problem is reported with
its line number, not just the first one.
"""

from __future__ import annotations

import csv
import io as _stdio
import math
from dataclasses import dataclass

import numpy as np

from . import qmath
from .experiments import (
    DEFAULT_N_EVENTS,
    DEFAULT_N_SEEDS,
    BiasModel,
    ResultRow,
    Scenario,
)

CSV_COLUMNS = (
    "scenario_id",
    "kind",
    "method",
    "d",
    "theta_a",
    "theta_b",
    "purity_p",
    "n_events",
    "seed",
    "trace_distance",
    "delta_rho",
    "bound",
    "bias_epsilon",
    "bias_efficiency",
)

_SCENARIO_KEYS = (
    "kind",
    "state",
    "d",
    "theta",
    "n_events",
    "seeds",
    "n_seeds",
    "methods",
    "source",
    "reference",
    "bias_epsilon",
    "bias_efficiency",
    "purity_grid",
)
_GLOBAL_KEYS = ("root_seed", "output_dir", "atol")


class ConfigError(ValueError):
    """Carries every validation problem found in a config file."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid config:\n" + "\n".join(self.errors))


@dataclass(frozen=True)
class ConfigDocument:
    scenarios: tuple[Scenario, ...]
    root_seed: int = 0
    output_dir: str = "results"
    atol: float = 1e-10


def _split_sections(text: str):
    """Yield (section_name, line_number, [(lineno, key, value), ...])."""
    sections = []
    current = None
    errors = []
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = (line[1:-1].strip(), lineno, [])
            sections.append(current)
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected 'key = value', got '{line}'")
            continue
        if current is None:
            errors.append(f"line {lineno}: assignment before any [section] header")
            continue
        key, _, value = line.partition("=")
        current[2].append((lineno, key.strip(), value.strip()))
    return sections, errors


def _parse_floats(value: str) -> list[float]:
    return [float(tok) for tok in value.split()]


def _parse_ints(value: str) -> list[int]:
    return [int(tok) for tok in value.split()]


def _build_scenario(sid: str, entries, errors: list[str]) -> Scenario | None:
    fields: dict = {}
    seen: dict[str, int] = {}
    for lineno, key, value in entries:
        if key not in _SCENARIO_KEYS:
            errors.append(f"line {lineno}: unknown scenario key '{key}'")
            continue
        if key in seen:
            errors.append(
                f"line {lineno}: key '{key}' already set on line {seen[key]}"
            )
            continue
        seen[key] = lineno
        try:
            if key == "kind":
                fields["kind"] = value
            elif key == "state":
                fields["input_state"] = value
            elif key == "d":
                fields["d"] = int(value)
            elif key == "theta":
                thetas = _parse_floats(value)
                for th in thetas:
                    if th == 0.0:
                        raise ValueError(
                            "theta = 0 makes the normalization "
                            "d/(4 sin(theta_a) sin(theta_b)) singular"
                        )
                    if not 0.0 < th <= math.pi / 2 + 1e-12:
                        raise ValueError(f"theta={th} outside (0, pi/2]")
                fields["theta_list"] = tuple(thetas)
            elif key == "n_events":
                fields["n_events"] = int(value)
            elif key == "seeds":
                fields["seeds"] = tuple(_parse_ints(value))
            elif key == "n_seeds":
                fields["seeds"] = tuple(range(int(value)))
            elif key == "methods":
                fields["methods"] = tuple(value.split())
            elif key == "source":
                fields["source"] = value
            elif key == "reference":
                fields["reference"] = value
            elif key == "bias_epsilon":
                fields["bias_epsilon"] = float(value)
            elif key == "bias_efficiency":
                fields["bias_efficiency"] = float(value)
            elif key == "purity_grid":
                fields["purity_grid"] = tuple(_parse_floats(value))
        except ValueError as exc:
            errors.append(f"line {lineno}: {exc}")
    if "seeds" in seen and "n_seeds" in seen:
        errors.append(f"section [scenario {sid}]: give either seeds or n_seeds, not both")
    eps = fields.pop("bias_epsilon", 0.0)
    eff = fields.pop("bias_efficiency", 1.0)
    if eps != 0.0 or eff != 1.0:
        try:
            fields["bias"] = BiasModel(pointer_rotation_epsilon=eps, per_projector_efficiency=eff)
        except ValueError as exc:
            errors.append(f"section [scenario {sid}]: {exc}")
    if "kind" not in fields:
        errors.append(f"section [scenario {sid}]: missing required key 'kind'")
        return None
    try:
        return Scenario(scenario_id=sid, **fields)
    except (TypeError, ValueError) as exc:
        errors.append(f"section [scenario {sid}]: {exc}")
        return None


def parse_config(text: str) -> ConfigDocument:
    """Parse and validate a whole config; raises ConfigError listing all problems."""
    sections, errors = _split_sections(text)
    root_seed = 0
    output_dir = "results"
    atol = 1e-10
    scenarios: list[Scenario] = []
    seen_ids: dict[str, int] = {}
    for name, header_line, entries in sections:
        if name == "global":
            for lineno, key, value in entries:
                if key not in _GLOBAL_KEYS:
                    errors.append(f"line {lineno}: unknown global key '{key}'")
                    continue
                try:
                    if key == "root_seed":
                        root_seed = int(value)
                    elif key == "output_dir":
                        output_dir = value
                    elif key == "atol":
                        atol = float(value)
                except ValueError as exc:
                    errors.append(f"line {lineno}: {exc}")
            continue
        if not name.startswith("scenario"):
            errors.append(f"line {header_line}: unknown section '[{name}]'")
            continue
        sid = name[len("scenario"):].strip()
        if not sid:
            errors.append(f"line {header_line}: scenario section needs an id")
            continue
        if sid in seen_ids:
            errors.append(
                f"line {header_line}: duplicate scenario id '{sid}' "
                f"(first defined on line {seen_ids[sid]})"
            )
            continue
        seen_ids[sid] = header_line
        scn = _build_scenario(sid, entries, errors)
        if scn is not None:
            scenarios.append(scn)
    if not scenarios and not errors:
        errors.append("config defines no scenarios")
    if errors:
        raise ConfigError(errors)
    return ConfigDocument(
        scenarios=tuple(scenarios), root_seed=root_seed, output_dir=output_dir, atol=atol
    )


def write_config(doc: ConfigDocument) -> str:
    """Serialize a document so that parse_config(write_config(doc)) round-trips."""
    lines = [
        "[global]",
        f"root_seed = {doc.root_seed}",
        f"output_dir = {doc.output_dir}",
        f"atol = {doc.atol!r}",
        "",
    ]
    for scn in doc.scenarios:
        lines.append(f"[scenario {scn.scenario_id}]")
        lines.append(f"kind = {scn.kind}")
        lines.append(f"state = {scn.input_state}")
        lines.append(f"d = {scn.d}")
        lines.append("theta = " + " ".join(repr(t) for t in scn.theta_list))
        lines.append(f"n_events = {scn.n_events}")
        lines.append("seeds = " + " ".join(str(s) for s in scn.seeds))
        lines.append("methods = " + " ".join(scn.methods))
        lines.append(f"source = {scn.source}")
        lines.append(f"reference = {scn.reference}")
        if scn.bias is not None:
            lines.append(f"bias_epsilon = {scn.bias.pointer_rotation_epsilon!r}")
            lines.append(f"bias_efficiency = {scn.bias.per_projector_efficiency!r}")
        if scn.kind == "purity_sweep":
            lines.append("purity_grid = " + " ".join(repr(p) for p in scn.purity_grid))
        lines.append("")
    return "\n".join(lines)


# -- Matrix serialization ------------------------------------------------------


def write_matrix(m, fmt: str = "text") -> str:
    """Serialize a matrix; 'text' is aligned for reading, 'machine' round-trips."""
    a = qmath.as_complex_matrix(m)
    if fmt == "text":
        cells = [
            [f"{a[r, c].real:+.6f}{a[r, c].imag:+.6f}i" for c in range(a.shape[1])]
            for r in range(a.shape[0])
        ]
        return "\n".join("  ".join(row) for row in cells)
    if fmt == "machine":
        lines = []
        for r in range(a.shape[0]):
            for c in range(a.shape[1]):
                lines.append(
                    f"{r + 1},{c + 1},{a[r, c].real:.17g},{a[r, c].imag:.17g}"
                )
        return "\n".join(lines)
    raise ValueError(f"unknown matrix format '{fmt}'")


def read_matrix(text: str) -> np.ndarray:
    """Parse the machine matrix format (1-indexed 'row,col,re,im' lines)."""
    entries = []
    rows = cols = 0
    for lineno, line in enumerate(text.strip().splitlines(), start=1):
        parts = line.strip().split(",")
        if len(parts) != 4:
            raise ValueError(f"matrix line {lineno}: expected 'row,col,re,im'")
        r, c = int(parts[0]), int(parts[1])
        entries.append((r, c, float(parts[2]), float(parts[3])))
        rows = max(rows, r)
        cols = max(cols, c)
    m = np.zeros((rows, cols), dtype=complex)
    for r, c, re, im in entries:
        m[r - 1, c - 1] = re + 1j * im
    return m


# -- Results CSV ---------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def results_csv(rows: list[ResultRow]) -> str:
    """Render result rows as CSV text with the fixed column set."""
    buf = _stdio.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(getattr(row, col)) for col in CSV_COLUMNS])
    return buf.getvalue()


def write_results(rows: list[ResultRow], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(results_csv(rows))
