"""Pairwise-comparison weighting: judgment matrices, eigenvector weights, consistency.

Entries are stored as exact rationals (``fractions.Fraction``) so reciprocity
survives round trips; eigen computation converts to floats.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import AlignmentError, ConvergenceError, EngineError, ValidationError

# Admissible comparison ratios: 1/9 ... 1/2, 1, 2 ... 9 (closed under reciprocals).
SAATY_VALUES: tuple[Fraction, ...] = tuple(
    sorted([Fraction(1, k) for k in range(2, 10)] + [Fraction(k) for k in range(1, 10)])
)
SAATY_SET = frozenset(SAATY_VALUES)

# Default random-index table. The 1.26 at order 6 reproduces the consistency
# ratios the bundled reference data prints (CI/CR ratios there are ~1.255-1.26);
# the widespread 1.24-at-6 table is available as CLASSIC_RI_TABLE.
DEFAULT_RI_TABLE: dict[int, float] = {
    1: 0.0, 2: 0.0, 3: 0.58, 4: 0.90, 5: 1.12,
    6: 1.26, 7: 1.36, 8: 1.41, 9: 1.46, 10: 1.49,
}
CLASSIC_RI_TABLE: dict[int, float] = {
    1: 0.0, 2: 0.0, 3: 0.58, 4: 0.90, 5: 1.12,
    6: 1.24, 7: 1.32, 8: 1.41, 9: 1.45, 10: 1.49,
}
DEFAULT_CR_THRESHOLD = 0.1

EIGEN_TOL = 1e-10
EIGEN_MAX_ITER = 10_000

# Floats are snapped to nearby rationals so values like 1/3 entered as 0.3333...
# regain exactness; anything genuinely irrational keeps a close approximation.
_FLOAT_DENOMINATOR_LIMIT = 1_000_000


def as_ratio(value) -> Fraction:
    """Coerce a matrix entry to an exact positive rational."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise EngineError(f"not a ratio: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value).limit_denominator(_FLOAT_DENOMINATOR_LIMIT)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise EngineError(f"cannot parse ratio {value!r}") from exc
    raise EngineError(f"cannot parse ratio {value!r}")


def format_ratio(value: Fraction) -> str:
    return str(value)


@dataclass(frozen=True)
class Violation:
    """One broken invariant, locating the offending cell where applicable."""

    code: str
    message: str
    cell: tuple[int, int] | None = None

    def __str__(self) -> str:
        return self.message


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[Violation, ...] = ()
    warnings: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def raise_if_invalid(self) -> "ValidationResult":
        if self.violations:
            raise ValidationError(self.violations)
        return self


@dataclass(frozen=True)
class JudgmentMatrix:
    """Square positive reciprocal matrix of pairwise importance ratios."""

    labels: tuple[str, ...]
    entries: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], labels: Sequence[str] | None = None) -> "JudgmentMatrix":
        entries = tuple(tuple(as_ratio(v) for v in row) for row in rows)
        n = len(entries)
        if labels is None:
            labels = tuple(f"c{i + 1}" for i in range(n))
        else:
            labels = tuple(labels)
        if len(labels) != n:
            raise AlignmentError(f"{len(labels)} labels for {n} rows")
        for i, row in enumerate(entries):
            if len(row) != n:
                raise AlignmentError(f"row {i} has {len(row)} entries, expected {n}")
        return cls(labels=labels, entries=entries)

    @property
    def n(self) -> int:
        return len(self.entries)

    def as_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.entries], dtype=float)

    def entry(self, i: int, j: int) -> Fraction:
        return self.entries[i][j]

    def with_entry(self, i: int, j: int, value) -> "JudgmentMatrix":
        """New matrix with (i, j) set and (j, i) forced to the reciprocal."""
        if i == j:
            raise EngineError("diagonal entries are fixed at 1")
        n = self.n
        if not (0 <= i < n and 0 <= j < n):
            raise EngineError(f"cell ({i}, {j}) outside {n}x{n} matrix")
        v = as_ratio(value)
        if v <= 0:
            raise EngineError(f"ratio must be positive, got {v}")
        rows = [list(row) for row in self.entries]
        rows[i][j] = v
        rows[j][i] = 1 / v
        return JudgmentMatrix(labels=self.labels, entries=tuple(tuple(r) for r in rows))

    def with_criterion(self, label: str, comparisons: Sequence) -> "JudgmentMatrix":
        """Append a criterion; ``comparisons[j]`` is new-vs-existing-j."""
        if label in self.labels:
            raise EngineError(f"duplicate criterion label {label!r}")
        ratios = [as_ratio(v) for v in comparisons]
        if len(ratios) != self.n:
            raise AlignmentError(f"need {self.n} comparisons, got {len(ratios)}")
        rows = [list(row) + [1 / r] for row, r in zip(self.entries, ratios)]
        rows.append(ratios + [Fraction(1)])
        return JudgmentMatrix(labels=self.labels + (label,), entries=tuple(tuple(r) for r in rows))

    def without_criterion(self, label: str) -> "JudgmentMatrix":
        if label not in self.labels:
            raise EngineError(f"unknown criterion label {label!r}")
        if self.n <= 2:
            raise EngineError("cannot shrink below 2 criteria")
        k = self.labels.index(label)
        keep = [i for i in range(self.n) if i != k]
        rows = tuple(tuple(self.entries[i][j] for j in keep) for i in keep)
        return JudgmentMatrix(labels=tuple(self.labels[i] for i in keep), entries=rows)


def validate_judgment_matrix(m: JudgmentMatrix, strict_scale: bool = False) -> ValidationResult:
    """Check positivity, unit diagonal, reciprocity and (optionally) scale membership."""
    violations: list[Violation] = []
    n = m.n
    if n < 2:
        violations.append(Violation("order", f"matrix order {n} < 2"))
        return ValidationResult(tuple(violations))
    for i in range(n):
        for j in range(n):
            v = m.entries[i][j]
            if v <= 0:
                violations.append(Violation("non_positive", f"entries[{i}][{j}] = {v} is not positive", (i, j)))
    if violations:
        return ValidationResult(tuple(violations))
    for i in range(n):
        if m.entries[i][i] != 1:
            violations.append(Violation("diagonal", f"entries[{i}][{i}] = {m.entries[i][i]} != 1", (i, i)))
    for i in range(n):
        for j in range(i + 1, n):
            if m.entries[i][j] * m.entries[j][i] != 1:
                violations.append(Violation(
                    "reciprocity",
                    f"entries[{j}][{i}] = {m.entries[j][i]} is not the reciprocal of entries[{i}][{j}] = {m.entries[i][j]}",
                    (j, i),
                ))
    if strict_scale:
        for i in range(n):
            for j in range(n):
                if i != j and m.entries[i][j] not in SAATY_SET:
                    violations.append(Violation(
                        "off_scale", f"entries[{i}][{j}] = {m.entries[i][j]} is not an admissible scale value", (i, j)))
    return ValidationResult(tuple(violations))


def principal_eigenpair(
    matrix: JudgmentMatrix | np.ndarray,
    tol: float = EIGEN_TOL,
    max_iter: int = EIGEN_MAX_ITER,
) -> tuple[float, np.ndarray]:
    """Dominant eigenvalue and sum-normalized positive eigenvector by power iteration.

    Starts from the uniform vector; stops when successive eigenvector
    estimates differ by less than ``tol`` in max-norm.
    """
    if tol <= 0:
        raise EngineError("tol must be positive")
    a = matrix.as_array() if isinstance(matrix, JudgmentMatrix) else np.asarray(matrix, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise AlignmentError(f"matrix is not square: {a.shape}")
    w = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        y = a @ w
        total = y.sum()
        if not np.isfinite(total) or total <= 0:
            raise ConvergenceError("iteration left the positive cone")
        w_next = y / total
        if np.max(np.abs(w_next - w)) < tol:
            # total = sum(A w) with w summing to 1, i.e. the eigenvalue estimate
            return float(total), w_next
        w = w_next
    raise ConvergenceError(f"no convergence after {max_iter} iterations")


@dataclass(frozen=True)
class WeightVector:
    """Normalized criterion weights, label order matching the source matrix."""

    labels: tuple[str, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.weights):
            raise AlignmentError(f"{len(self.labels)} labels for {len(self.weights)} weights")
        if any(w <= 0 for w in self.weights):
            raise ValidationError([Violation("non_positive", "weight components must be positive")])
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValidationError([Violation("normalization", f"weights sum to {sum(self.weights)}, not 1")])

    def as_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, self.weights))

    def __getitem__(self, label: str) -> float:
        return self.weights[self.labels.index(label)]


@dataclass(frozen=True)
class ConsistencyReport:
    lambda_max: float
    ci: float
    ri: float
    cr: float
    acceptable: bool


def lookup_ri(ri_table: Mapping[int, float] | None, n: int) -> float:
    table = DEFAULT_RI_TABLE if ri_table is None else ri_table
    if n not in table:
        raise EngineError(f"no random index for order {n}; supply an RI table covering it")
    return float(table[n])


def validate_ri_table(table: Mapping[int, float]) -> ValidationResult:
    violations = []
    for n, ri in table.items():
        if ri < 0:
            violations.append(Violation("ri_negative", f"RI({n}) = {ri} < 0"))
    for n in (1, 2):
        if n in table and table[n] != 0:
            violations.append(Violation("ri_order", f"RI({n}) must be 0"))
    ordered = sorted(table.items())
    for (n1, r1), (n2, r2) in zip(ordered, ordered[1:]):
        if r2 < r1:
            violations.append(Violation("ri_monotone", f"RI({n2}) = {r2} < RI({n1}) = {r1}"))
    return ValidationResult(tuple(violations))


def _consistency_from_lambda(lambda_max: float, n: int, ri_table, threshold: float) -> ConsistencyReport:
    ci = (lambda_max - n) / (n - 1)
    ri = lookup_ri(ri_table, n)
    # any 2x2 reciprocal matrix is perfectly consistent; RI is 0 there as well
    cr = 0.0 if n <= 2 else (ci / ri if ri > 0 else 0.0)
    return ConsistencyReport(lambda_max=lambda_max, ci=ci, ri=ri, cr=cr, acceptable=cr <= threshold)


def consistency_check(
    m: JudgmentMatrix,
    ri_table: Mapping[int, float] | None = None,
    threshold: float = DEFAULT_CR_THRESHOLD,
) -> ConsistencyReport:
    lambda_max, _ = principal_eigenpair(m)
    return _consistency_from_lambda(lambda_max, m.n, ri_table, threshold)


def derive_weights(
    m: JudgmentMatrix,
    ri_table: Mapping[int, float] | None = None,
    threshold: float = DEFAULT_CR_THRESHOLD,
) -> tuple[WeightVector, ConsistencyReport]:
    """Principal-eigenvector weights plus the consistency report, one eigen solve.

    Succeeds even when the matrix is not acceptably consistent; the report
    flags it and the caller decides.
    """
    lambda_max, vec = principal_eigenpair(m)
    report = _consistency_from_lambda(lambda_max, m.n, ri_table, threshold)
    weights = WeightVector(labels=m.labels, weights=tuple(float(x) for x in vec))
    return weights, report
