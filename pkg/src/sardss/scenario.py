"""Scenarios: criteria, periods, alternatives, rankings and tool selection."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .ahp import (
    ConsistencyReport,
    DEFAULT_CR_THRESHOLD,
    JudgmentMatrix,
    WeightVector,
    derive_weights,
    validate_judgment_matrix,
)
from .errors import AlignmentError, EngineError, ValidationError
from .fuzzy import (
    DEFAULT_SCALE,
    EvaluationOutcome,
    FuzzyRelationMatrix,
    LevelScale,
    evaluate,
    validate_relation_matrix,
)

POLICY_KINDS = ("all", "top_k", "score_threshold", "grade_at_least")


@dataclass(frozen=True)
class Criterion:
    id: str
    name: str


@dataclass(frozen=True)
class CriterionSet:
    """Ordered criteria; the order is canonical for every matrix in a scenario."""

    criteria: tuple[Criterion, ...]

    def __post_init__(self):
        ids = [c.id for c in self.criteria]
        if len(set(ids)) != len(ids):
            raise EngineError("criterion identifiers must be unique")

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.criteria)

    def __len__(self) -> int:
        return len(self.criteria)

    def __iter__(self):
        return iter(self.criteria)

    def name_of(self, cid: str) -> str:
        for c in self.criteria:
            if c.id == cid:
                return c.name
        raise KeyError(cid)


@dataclass(frozen=True)
class SelectionPolicy:
    kind: str
    k: int | None = None
    threshold: float | None = None
    level: str | None = None

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise EngineError(f"unknown selection policy {self.kind!r}")
        if self.kind == "top_k":
            if self.k is None or self.k <= 0:
                raise EngineError(f"top_k needs k > 0, got {self.k}")
        if self.kind == "score_threshold" and self.threshold is None:
            raise EngineError("score_threshold needs a threshold")
        if self.kind == "grade_at_least" and not self.level:
            raise EngineError("grade_at_least needs a level label")

    @classmethod
    def all(cls) -> "SelectionPolicy":
        return cls(kind="all")

    @classmethod
    def top_k(cls, k: int) -> "SelectionPolicy":
        return cls(kind="top_k", k=k)

    @classmethod
    def score_threshold(cls, threshold: float) -> "SelectionPolicy":
        return cls(kind="score_threshold", threshold=float(threshold))

    @classmethod
    def grade_at_least(cls, level: str) -> "SelectionPolicy":
        return cls(kind="grade_at_least", level=level)


@dataclass(frozen=True)
class Alternative:
    """An evaluated transport (category or individual tool)."""

    id: str
    name: str
    category: str
    relation: FuzzyRelationMatrix
    metadata: Mapping[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class PeriodProfile:
    """A rescue period: judgment matrix plus weights derived from it.

    Weights are computed at construction; editing the matrix means building a
    new profile, so the cache can never go stale.
    """

    id: str
    matrix: JudgmentMatrix
    policy: SelectionPolicy
    weights: WeightVector
    consistency: ConsistencyReport
    annotations: tuple[str, ...] = ()

    @classmethod
    def build(
        cls,
        period_id: str,
        matrix: JudgmentMatrix,
        policy: SelectionPolicy | None = None,
        ri_table: Mapping[int, float] | None = None,
        threshold: float = DEFAULT_CR_THRESHOLD,
        annotations: Sequence[str] = (),
    ) -> "PeriodProfile":
        validate_judgment_matrix(matrix).raise_if_invalid()
        weights, report = derive_weights(matrix, ri_table=ri_table, threshold=threshold)
        return cls(
            id=period_id,
            matrix=matrix,
            policy=policy or SelectionPolicy.all(),
            weights=weights,
            consistency=report,
            annotations=tuple(annotations),
        )

    def with_matrix(self, matrix: JudgmentMatrix, ri_table=None, threshold: float = DEFAULT_CR_THRESHOLD) -> "PeriodProfile":
        return PeriodProfile.build(
            self.id, matrix, policy=self.policy, ri_table=ri_table,
            threshold=threshold, annotations=self.annotations,
        )


@dataclass(frozen=True)
class RankingResult:
    period_id: str
    entries: tuple[tuple[str, EvaluationOutcome], ...]
    selection: tuple[str, ...]

    def order(self) -> tuple[str, ...]:
        return tuple(alt_id for alt_id, _ in self.entries)

    def outcome(self, alt_id: str) -> EvaluationOutcome:
        for aid, outcome in self.entries:
            if aid == alt_id:
                return outcome
        raise KeyError(alt_id)


@dataclass(frozen=True)
class TwoLayerResult:
    """Category ranking plus per-category tool rankings and a flattened selection."""

    categories: RankingResult
    tools: tuple[tuple[str, RankingResult], ...]
    selection: tuple[str, ...]


@dataclass(frozen=True)
class Scenario:
    criteria: CriterionSet
    scale: LevelScale
    periods: tuple[PeriodProfile, ...]
    alternatives: tuple[Alternative, ...]
    ri_table: Mapping[int, float] | None = None
    annotations: tuple[str, ...] = ()

    def __post_init__(self):
        ids = self.criteria.ids
        for p in self.periods:
            if p.matrix.labels != ids:
                raise AlignmentError(f"period {p.id!r} matrix labels {p.matrix.labels} != criteria {ids}")
        for a in self.alternatives:
            if a.relation.criteria_labels != ids:
                raise AlignmentError(f"alternative {a.id!r} relation labels do not match the criterion set")
            if a.relation.level_count != len(self.scale):
                raise AlignmentError(f"alternative {a.id!r} has {a.relation.level_count} levels, scale has {len(self.scale)}")
        pids = [p.id for p in self.periods]
        if len(set(pids)) != len(pids):
            raise EngineError("period ids must be unique")
        aids = [a.id for a in self.alternatives]
        if len(set(aids)) != len(aids):
            raise EngineError("alternative ids must be unique")

    def period(self, period_id: str) -> PeriodProfile:
        for p in self.periods:
            if p.id == period_id:
                return p
        raise KeyError(period_id)

    def alternative(self, alt_id: str) -> Alternative:
        for a in self.alternatives:
            if a.id == alt_id:
                return a
        raise KeyError(alt_id)

    @property
    def period_ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.periods)


def evaluate_alternative(period: PeriodProfile, alt: Alternative, scale: LevelScale = DEFAULT_SCALE) -> EvaluationOutcome:
    """Synthesize the period weights with the alternative's relation matrix."""
    result = validate_relation_matrix(alt.relation)
    if not result.ok:
        raise ValidationError(result.violations)
    return evaluate(period.weights, alt.relation, scale)


def rank_period(period: PeriodProfile, alts: Sequence[Alternative], scale: LevelScale = DEFAULT_SCALE) -> RankingResult:
    """Deterministic descending-score ranking; score ties break by id."""
    if not alts:
        raise EngineError("cannot rank an empty alternative list")
    outcomes = [(a.id, evaluate_alternative(period, a, scale)) for a in alts]
    outcomes.sort(key=lambda pair: (-pair[1].score, pair[0]))
    ranking = RankingResult(period_id=period.id, entries=tuple(outcomes), selection=())
    return replace(ranking, selection=select_tools(ranking, period.policy, scale))


def select_tools(ranking: RankingResult, policy: SelectionPolicy, scale: LevelScale = DEFAULT_SCALE) -> tuple[str, ...]:
    """Apply a selection policy to a ranking, preserving ranking order."""
    if not ranking.entries:
        raise EngineError("cannot select from an empty ranking")
    if policy.kind == "all":
        return ranking.order()
    if policy.kind == "top_k":
        if policy.k is None or policy.k <= 0:
            raise EngineError(f"top_k needs k > 0, got {policy.k}")
        return ranking.order()[: policy.k]
    if policy.kind == "score_threshold":
        lo, hi = min(scale.scores), max(scale.scores)
        if policy.threshold is None or not (lo <= policy.threshold <= hi):
            raise EngineError(f"threshold {policy.threshold} outside score range [{lo}, {hi}]")
        return tuple(aid for aid, out in ranking.entries if out.score >= policy.threshold)
    if policy.kind == "grade_at_least":
        if policy.level not in scale.labels:
            raise EngineError(f"unknown grade {policy.level!r}")
        cutoff = scale.index(policy.level)
        return tuple(aid for aid, out in ranking.entries if out.grade_index <= cutoff)
    raise EngineError(f"unknown selection policy {policy.kind!r}")


def evaluate_two_layer(
    period: PeriodProfile,
    category_alts: Sequence[Alternative],
    tool_alts_by_category: Mapping[str, Sequence[Alternative]],
    scale: LevelScale = DEFAULT_SCALE,
) -> TwoLayerResult:
    """Rank categories, then tools within each category; selection is over the tools.

    With no tool data at all this degenerates to the category ranking.
    """
    categories = rank_period(period, category_alts, scale)
    tool_rankings: list[tuple[str, RankingResult]] = []
    for cat_id in categories.order():
        if cat_id not in tool_alts_by_category:
            continue
        tools = list(tool_alts_by_category[cat_id])
        if not tools:
            raise EngineError(f"category {cat_id!r} has zero tools")
        tool_rankings.append((cat_id, rank_period(period, tools, scale)))
    unknown = set(tool_alts_by_category) - {aid for aid, _ in categories.entries}
    if unknown:
        raise EngineError(f"tool map names unknown categories: {sorted(unknown)}")
    if not tool_rankings:
        return TwoLayerResult(categories=categories, tools=(), selection=categories.selection)
    flat = [entry for _, ranking in tool_rankings for entry in ranking.entries]
    flat.sort(key=lambda pair: (-pair[1].score, pair[0]))
    flat_ranking = RankingResult(period_id=period.id, entries=tuple(flat), selection=())
    selection = select_tools(flat_ranking, period.policy, scale)
    return TwoLayerResult(categories=categories, tools=tuple(tool_rankings), selection=selection)
