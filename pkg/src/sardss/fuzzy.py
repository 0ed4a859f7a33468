"""Fuzzy synthetic evaluation: weighted membership synthesis, grading and scoring."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ahp import ValidationResult, Violation, WeightVector
from .errors import AlignmentError, EngineError

# Row masses this far from 1 are tolerated (warned about) by default; the
# bundled reference data contains one row summing to 0.9 that must load as-is.
DEFAULT_MASS_TOL = 0.11
TIE_TOL = 1e-9


@dataclass(frozen=True)
class LevelScale:
    """Ordered grade labels with strictly decreasing numeric scores."""

    labels: tuple[str, ...]
    scores: tuple[float, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.scores):
            raise AlignmentError(f"{len(self.labels)} labels for {len(self.scores)} scores")
        if len(self.labels) < 2:
            raise EngineError("a level scale needs at least 2 grades")
        if len(set(self.labels)) != len(self.labels):
            raise EngineError("grade labels must be distinct")
        if any(b >= a for a, b in zip(self.scores, self.scores[1:])):
            raise EngineError("grade scores must be strictly decreasing")

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)


DEFAULT_SCALE = LevelScale(
    labels=("Excellent", "Good", "Moderate", "Pass", "Fail"),
    scores=(100.0, 80.0, 60.0, 40.0, 20.0),
)


@dataclass(frozen=True)
class FuzzyRelationMatrix:
    """Per-criterion membership rows over the grade levels, for one alternative."""

    criteria_labels: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]], criteria_labels: Sequence[str] | None = None) -> "FuzzyRelationMatrix":
        tup = tuple(tuple(float(v) for v in row) for row in rows)
        if not tup or not tup[0]:
            raise EngineError("relation matrix must be non-empty")
        m = len(tup[0])
        for i, row in enumerate(tup):
            if len(row) != m:
                raise AlignmentError(f"row {i} has {len(row)} levels, expected {m}")
        if criteria_labels is None:
            criteria_labels = tuple(f"c{i + 1}" for i in range(len(tup)))
        else:
            criteria_labels = tuple(criteria_labels)
        if len(criteria_labels) != len(tup):
            raise AlignmentError(f"{len(criteria_labels)} labels for {len(tup)} rows")
        return cls(criteria_labels=criteria_labels, rows=tup)

    @property
    def level_count(self) -> int:
        return len(self.rows[0])

    def as_array(self) -> np.ndarray:
        return np.asarray(self.rows, dtype=float)

    def row_masses(self) -> tuple[float, ...]:
        return tuple(float(sum(row)) for row in self.rows)

    def with_criterion_row(self, label: str, row: Sequence[float]) -> "FuzzyRelationMatrix":
        if label in self.criteria_labels:
            raise EngineError(f"duplicate criterion label {label!r}")
        values = tuple(float(v) for v in row)
        if len(values) != self.level_count:
            raise AlignmentError(f"row has {len(values)} levels, expected {self.level_count}")
        return FuzzyRelationMatrix(self.criteria_labels + (label,), self.rows + (values,))

    def without_criterion_row(self, label: str) -> "FuzzyRelationMatrix":
        if label not in self.criteria_labels:
            raise EngineError(f"unknown criterion label {label!r}")
        k = self.criteria_labels.index(label)
        return FuzzyRelationMatrix(
            tuple(l for i, l in enumerate(self.criteria_labels) if i != k),
            tuple(r for i, r in enumerate(self.rows) if i != k),
        )

    def renormalized(self) -> "FuzzyRelationMatrix":
        """Rows rescaled to unit mass (opt-in transform; never applied implicitly)."""
        rows = []
        for row in self.rows:
            s = sum(row)
            if s <= 0:
                raise EngineError("cannot renormalize a zero-mass row")
            rows.append(tuple(v / s for v in row))
        return FuzzyRelationMatrix(self.criteria_labels, tuple(rows))


def validate_relation_matrix(
    r: FuzzyRelationMatrix,
    strict: bool = False,
    mass_tol: float = DEFAULT_MASS_TOL,
) -> ValidationResult:
    """Entry-range and row-mass checks.

    Strict mode demands exact row stochasticity (1e-9); tolerance mode accepts
    masses within ``mass_tol`` of 1 but still reports them as warnings.
    """
    violations: list[Violation] = []
    warnings: list[Violation] = []
    for i, row in enumerate(r.rows):
        for j, v in enumerate(row):
            if not (0.0 <= v <= 1.0):
                violations.append(Violation("entry_range", f"rows[{i}][{j}] = {v} outside [0, 1]", (i, j)))
    for i, mass in enumerate(r.row_masses()):
        off = abs(mass - 1.0)
        if strict:
            if off > 1e-9:
                violations.append(Violation("row_mass", f"row {i} mass {mass:.6g} != 1", (i, -1)))
        else:
            if off > mass_tol:
                violations.append(Violation("row_mass", f"row {i} mass {mass:.6g} outside 1 +/- {mass_tol}", (i, -1)))
            elif off > 1e-9:
                warnings.append(Violation("row_mass", f"row {i} mass {mass:.6g}", (i, -1)))
    return ValidationResult(tuple(violations), tuple(warnings))


def synthesize(q: WeightVector | Sequence[float], r: FuzzyRelationMatrix) -> np.ndarray:
    """Membership vector B with B[j] = sum_i q_i * r[i][j] (weighted average, no clamping)."""
    if isinstance(q, WeightVector):
        if q.labels != r.criteria_labels:
            raise AlignmentError(
                f"weight labels {list(q.labels)} do not match relation criteria {list(r.criteria_labels)}")
        w = q.as_array()
    else:
        w = np.asarray(q, dtype=float)
        if w.shape != (len(r.criteria_labels),):
            raise AlignmentError(f"{w.shape[0] if w.ndim else 0} weights for {len(r.criteria_labels)} criteria")
    return w @ r.as_array()


def classify_max_membership(b: Sequence[float], scale: LevelScale) -> tuple[str, int, bool]:
    """Grade by maximum membership; ties go to the better grade and raise a flag."""
    values = np.asarray(b, dtype=float)
    if values.size == 0:
        raise EngineError("empty membership vector")
    if values.size != len(scale):
        raise AlignmentError(f"{values.size} memberships for {len(scale)} grades")
    idx = int(np.argmax(values))  # first (better-grade) index attaining the max
    top_two = np.sort(values)[-2:]
    tie = bool(top_two[1] - top_two[0] < TIE_TOL)
    return scale.labels[idx], idx, tie


def score(b: Sequence[float], scale: LevelScale) -> float:
    """Scalar score: dot of grade scores with the membership vector, no mass normalization."""
    values = np.asarray(b, dtype=float)
    if values.size != len(scale):
        raise AlignmentError(f"{values.size} memberships for {len(scale)} grades")
    return float(np.dot(np.asarray(scale.scores), values))


@dataclass(frozen=True)
class EvaluationOutcome:
    membership: tuple[float, ...]
    grade: str
    grade_index: int
    tie_flag: bool
    score: float


def evaluate(q: WeightVector | Sequence[float], r: FuzzyRelationMatrix, scale: LevelScale) -> EvaluationOutcome:
    b = synthesize(q, r)
    grade, idx, tie = classify_max_membership(b, scale)
    return EvaluationOutcome(
        membership=tuple(float(x) for x in b),
        grade=grade,
        grade_index=idx,
        tie_flag=tie,
        score=score(b, scale),
    )
