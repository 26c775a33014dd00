"""First-order Sugeno model and the two ways of generating an initial one.

``grid_partition`` spreads evenly spaced membership functions over each input
and enumerates every antecedent combination as a rule. ``subtractive_clustering``
places one rule per cluster centre found by Chiu's potential-field method.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DataError, DegenerateInputError, ShapeError
from .membership import Gaussian, MembershipFunction, resolve_family


@dataclass(frozen=True)
class FuzzyVariable:
    name: str
    range: tuple[float, float]
    mfs: tuple[MembershipFunction, ...]

    def __post_init__(self):
        lo, hi = (float(v) for v in self.range)
        if not lo < hi:
            raise DegenerateInputError(f"variable {self.name!r} needs lo < hi, got [{lo}, {hi}]")
        if not self.mfs:
            raise ConfigurationError(f"variable {self.name!r} has no membership functions")
        object.__setattr__(self, "range", (lo, hi))
        object.__setattr__(self, "mfs", tuple(self.mfs))

    @property
    def lo(self) -> float:
        return self.range[0]

    @property
    def hi(self) -> float:
        return self.range[1]


@dataclass(frozen=True)
class Rule:
    """IF x1 is A[i1] and ... THEN y = p . x + r, with consequent = (p1..pn, r)."""

    antecedent: tuple[int, ...]
    consequent: tuple[float, ...]


@dataclass(frozen=True, eq=False)
class SugenoFis:
    """Input variables plus a rule base stored as two arrays.

    ``antecedents[i, j]`` is the MF index rule ``i`` uses on input ``j``;
    ``consequents[i]`` holds ``(p_1, ..., p_n, r)``.
    """

    inputs: tuple[FuzzyVariable, ...]
    antecedents: np.ndarray
    consequents: np.ndarray = field(default=None)

    def __post_init__(self):
        inputs = tuple(self.inputs)
        ante = np.asarray(self.antecedents, dtype=int)
        n = len(inputs)
        if ante.ndim != 2 or ante.shape[1] != n or ante.shape[0] == 0:
            raise ShapeError(f"antecedents must have shape (rules, {n}), got {ante.shape}")
        counts = np.array([len(v.mfs) for v in inputs])
        if np.any(ante < 0) or np.any(ante >= counts):
            raise ShapeError("rule antecedent references a missing membership function")
        cons = self.consequents
        cons = np.zeros((ante.shape[0], n + 1)) if cons is None else np.asarray(cons, dtype=float)
        if cons.shape != (ante.shape[0], n + 1):
            raise ShapeError(f"consequents must have shape {(ante.shape[0], n + 1)}, got {cons.shape}")
        ante = ante.copy()
        cons = cons.copy()
        ante.flags.writeable = False
        cons.flags.writeable = False
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "antecedents", ante)
        object.__setattr__(self, "consequents", cons)

    @classmethod
    def from_rules(cls, inputs: Sequence[FuzzyVariable], rules: Sequence[Rule]) -> SugenoFis:
        return cls(
            tuple(inputs),
            np.array([r.antecedent for r in rules], dtype=int),
            np.array([r.consequent for r in rules], dtype=float),
        )

    @property
    def rules(self) -> list[Rule]:
        return [
            Rule(tuple(int(i) for i in a), tuple(float(c) for c in p))
            for a, p in zip(self.antecedents, self.consequents)
        ]

    @property
    def arity(self) -> int:
        return len(self.inputs)

    @property
    def n_rules(self) -> int:
        return self.antecedents.shape[0]

    @property
    def mf_counts(self) -> tuple[int, ...]:
        return tuple(len(v.mfs) for v in self.inputs)

    @property
    def n_mfs(self) -> int:
        return sum(self.mf_counts)

    @property
    def mf_kinds(self) -> tuple[str, ...]:
        return tuple(sorted({mf.kind for v in self.inputs for mf in v.mfs}))

    def with_consequents(self, consequents) -> SugenoFis:
        return replace(self, consequents=np.asarray(consequents, dtype=float))

    # Premise parameters flattened in (input, mf, parameter) order.

    def premise_vector(self) -> np.ndarray:
        return np.concatenate([mf.params for v in self.inputs for mf in v.mfs])

    def premise_slices(self) -> list[list[slice]]:
        """``slices[j][m]`` locates MF ``m`` of input ``j`` in ``premise_vector``."""
        out, pos = [], 0
        for var in self.inputs:
            row = []
            for mf in var.mfs:
                row.append(slice(pos, pos + mf.n_params))
                pos += mf.n_params
            out.append(row)
        return out

    def with_premise_vector(self, vector) -> SugenoFis:
        vector = np.asarray(vector, dtype=float)
        if vector.shape != (sum(mf.n_params for v in self.inputs for mf in v.mfs),):
            raise ShapeError(f"premise vector has wrong shape {vector.shape}")
        slices = self.premise_slices()
        inputs = tuple(
            replace(var, mfs=tuple(mf.with_params(vector[s]) for mf, s in zip(var.mfs, slices[j])))
            for j, var in enumerate(self.inputs)
        )
        return replace(self, inputs=inputs)


def _rows_of(data) -> np.ndarray:
    rows = data.rows if hasattr(data, "rows") else data
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.shape[0] == 0:
        raise DataError("cannot build a model from an empty dataset")
    return rows


def _targets_of(data) -> np.ndarray | None:
    return np.asarray(data.targets, dtype=float) if hasattr(data, "targets") else None


def grid_partition(data, mf_counts: Sequence[int], mf_type: str = "gaussian") -> SugenoFis:
    """Evenly spaced MFs over each column's [min, max]; one rule per combination."""
    rows = _rows_of(data)
    counts = [int(c) for c in mf_counts]
    if len(counts) != rows.shape[1]:
        raise ConfigurationError(f"{len(counts)} MF counts given for {rows.shape[1]} inputs")
    if any(c < 2 for c in counts):
        raise ConfigurationError(f"every input needs at least 2 MFs, got {tuple(counts)}")
    family = resolve_family(mf_type)
    inputs = []
    for j, count in enumerate(counts):
        lo, hi = float(rows[:, j].min()), float(rows[:, j].max())
        if not hi > lo:
            raise DegenerateInputError(f"input column {j} (x{j + 1}) is constant ({lo})")
        spacing = (hi - lo) / (count - 1)
        centers = np.linspace(lo, hi, count)
        mfs = tuple(family.for_grid(float(c), spacing) for c in centers)
        inputs.append(FuzzyVariable(f"x{j + 1}", (lo, hi), mfs))
    antecedents = np.array(list(itertools.product(*(range(c) for c in counts))), dtype=int)
    return SugenoFis(tuple(inputs), antecedents)


SQUASH_FACTOR = 1.25
ACCEPT_RATIO = 0.5
REJECT_RATIO = 0.15


def cluster_centers(points: np.ndarray, radius: float) -> np.ndarray:
    """Chiu's subtractive clustering on points already scaled to the unit box.

    Returns the indices of the selected centres, in order of selection.
    """
    alpha = 4.0 / radius**2
    beta = 4.0 / (SQUASH_FACTOR * radius) ** 2
    sq_dist = np.sum((points[:, None, :] - points[None, :, :]) ** 2, axis=-1)
    potential = np.exp(-alpha * sq_dist).sum(axis=1)
    first_peak = potential.max()
    chosen: list[int] = []
    while True:
        k = int(np.argmax(potential))
        peak = potential[k]
        if peak <= 0.0:
            break
        if chosen and peak < REJECT_RATIO * first_peak:
            break
        accept = not chosen or peak > ACCEPT_RATIO * first_peak
        if not accept:
            d_min = math.sqrt(sq_dist[k, chosen].min())
            accept = d_min / radius + peak / first_peak >= 1.0
        if not accept:
            potential[k] = 0.0
            continue
        chosen.append(k)
        potential = potential - peak * np.exp(-beta * sq_dist[k])
        potential[k] = 0.0
    return np.array(chosen, dtype=int)


def subtractive_clustering(data, radius: float = 0.5) -> SugenoFis:
    """One Gaussian-MF rule per cluster found in the joint (inputs, target) space."""
    if not 0.0 < radius <= 1.0:
        raise ConfigurationError(f"cluster radius must lie in (0, 1], got {radius}")
    rows = _rows_of(data)
    targets = _targets_of(data)
    joint = rows if targets is None else np.column_stack([rows, targets])
    lo, hi = joint.min(axis=0), joint.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    centers = joint[cluster_centers((joint - lo) / span, radius)]

    inputs = []
    for j in range(rows.shape[1]):
        v_lo, v_hi = float(lo[j]), float(hi[j])
        if not v_hi > v_lo:
            # constant column: widen so the variable still has a range
            v_lo, v_hi = v_lo - 0.5, v_hi + 0.5
        sigma = max(radius * (v_hi - v_lo) / math.sqrt(8.0), 1e-9)
        mfs = tuple(Gaussian(float(c), sigma) for c in centers[:, j])
        inputs.append(FuzzyVariable(f"x{j + 1}", (v_lo, v_hi), mfs))
    n_rules = centers.shape[0]
    antecedents = np.repeat(np.arange(n_rules)[:, None], rows.shape[1], axis=1)
    return SugenoFis(tuple(inputs), antecedents)


def architecture_string(fis: SugenoFis) -> str:
    """``inputs:hidden:1`` where hidden counts MF nodes plus two nodes per rule."""
    hidden = fis.n_mfs + 2 * fis.n_rules
    return f"{fis.arity}:{hidden}:1"


def architecture_for_counts(mf_counts: Sequence[int]) -> str:
    """Architecture of a grid-partitioned model, without building it."""
    counts = [int(c) for c in mf_counts]
    return f"{len(counts)}:{sum(counts) + 2 * math.prod(counts)}:1"


def describe_rules(fis: SugenoFis, labels: Sequence[str] | None = None) -> list[str]:
    """Readable IF-THEN lines, one per rule."""
    lines = []
    for i, rule in enumerate(fis.rules, start=1):
        terms = []
        for j, m in enumerate(rule.antecedent):
            count = len(fis.inputs[j].mfs)
            if labels is not None and count == len(labels):
                name = labels[m]
            elif count == 2:
                name = ("low", "high")[m]
            else:
                name = f"mf{m + 1}"
            terms.append(f"{fis.inputs[j].name} is {name}")
        coeffs = " + ".join(f"{p:.6g}*{fis.inputs[j].name}" for j, p in enumerate(rule.consequent[:-1]))
        lines.append(f"R{i}: IF {' and '.join(terms)} THEN y = {coeffs} + {rule.consequent[-1]:.6g}")
    return lines
