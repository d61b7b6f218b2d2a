"""Resource constraints: runtime checks a backend must pass before the main
computation is dispatched.

A constraint evaluates against a backend adapter and produces an
``IntrospectionResult`` with a pass/fail flag and named scores.  The probe
here is ``PackedCHSHTest``, which runs one packed Bell-test circuit and
scores entanglement quality; ``CalibrationConstraint`` checks published
device properties without spending any shots.  Constraints compose with
AND/OR/NOT and can be wrapped with a TTL cache (``FreshWithin``).

Everything is immutable except FreshWithin's cache.  New constraint kinds
plug in by implementing :class:`ResourceConstraint`.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Any, Callable, Iterable, Mapping, Protocol

from .backends import BackendAdapter, ExperimentResult
from .chsh import (
    chsh_score,
    compute_pair_correlator,
    correlator_standard_error,
    score_standard_error,
)
from .circuits import MeasurementSettings, packed_chsh_circuit
from .errors import DocumentError
from .timestamps import format_timestamp, utc_now


class Policy(Protocol):
    """A pure threshold decision over one scalar score."""

    threshold: float

    def decide(self, value: float) -> bool: ...


@dataclass(frozen=True)
class MinimumAcceptableValue:
    """Passes iff the score is at least the threshold (boundary passes)."""

    threshold: float

    def decide(self, value: float) -> bool:
        return value >= self.threshold


@dataclass(frozen=True)
class MaximumAcceptableValue:
    """Passes iff the score is at most the threshold (boundary passes)."""

    threshold: float

    def decide(self, value: float) -> bool:
        return value <= self.threshold


@dataclass(frozen=True)
class IntrospectionResult:
    """The outcome of one constraint evaluation.

    ``scores`` holds the named numbers the decision was based on; composite
    constraints carry their evaluated children in order.  Subscripting reads
    a score, so ``result["CHSH_score"]`` works directly.
    """

    constraint_name: str
    passed: bool
    scores: Mapping[str, float] = field(default_factory=dict)
    evaluated_at: datetime = field(default_factory=utc_now)
    evidence: ExperimentResult | None = None
    children: tuple["IntrospectionResult", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "scores", dict(self.scores))
        object.__setattr__(self, "children", tuple(self.children))

    def __getitem__(self, key: str) -> float:
        return self.scores[key]

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "constraint_name": self.constraint_name,
            "passed": self.passed,
            "scores": dict(self.scores),
            "evaluated_at": format_timestamp(self.evaluated_at),
        }
        if self.evidence is not None:
            doc["evidence"] = self.evidence.to_dict()
        if self.children:
            doc["children"] = [child.to_dict() for child in self.children]
        return doc


class ResourceConstraint:
    """Interface for runtime resource checks; an extension point."""

    def evaluate(self, adapter: BackendAdapter, shots: int) -> IntrospectionResult:
        raise NotImplementedError

    def name(self) -> str:
        raise NotImplementedError


class PackedCHSHTest(ResourceConstraint):
    """Entanglement-quality probe: one packed Bell-test run, scored against
    a policy threshold.

    All four correlators come from a single circuit execution (one job, one
    queue wait, identical device conditions across the four settings).  The
    policy decides on the point estimate of S; per-correlator standard
    errors are reported in the scores but do not affect the decision.
    """

    def __init__(
        self,
        policy: Policy,
        settings: MeasurementSettings = MeasurementSettings(),
        clock: Callable[[], datetime] = utc_now,
    ):
        self._policy = policy
        self._settings = settings
        self._clock = clock

    def name(self) -> str:
        return "PackedCHSHTest"

    def evaluate(self, adapter: BackendAdapter, shots: int) -> IntrospectionResult:
        if shots < 1:
            raise ValueError(f"shots must be >= 1, got {shots}")
        result = adapter.run(packed_chsh_circuit(self._settings), shots)
        correlators = tuple(
            compute_pair_correlator(result.counts, pair) for pair in range(4)
        )
        score = chsh_score(*correlators)
        scores = {
            "CHSH_score": score,
            "E00": correlators[0],
            "E01": correlators[1],
            "E10": correlators[2],
            "E11": correlators[3],
            "se_E00": correlator_standard_error(correlators[0], shots),
            "se_E01": correlator_standard_error(correlators[1], shots),
            "se_E10": correlator_standard_error(correlators[2], shots),
            "se_E11": correlator_standard_error(correlators[3], shots),
            "se_S": score_standard_error(correlators, shots),
            "threshold": self._policy.threshold,
        }
        return IntrospectionResult(
            constraint_name=self.name(),
            passed=self._policy.decide(score),
            scores=scores,
            evaluated_at=self._clock(),
            evidence=result,
        )


class CalibrationConstraint(ResourceConstraint):
    """Threshold checks against the backend's calibration snapshot.

    Aggregation is worst-case: minimum over qubits for T1/T2, maximum for
    error rates, because one bad qubit in the selected set breaks a
    computation.  No circuit is run and ``shots`` is ignored.  A criterion
    over data the snapshot does not carry (e.g. max_gate_error with an empty
    gate list) passes vacuously and reports no score for it.
    """

    _CRITERIA = (
        "min_qubits",
        "min_t1_us",
        "min_t2_us",
        "max_readout_error",
        "max_gate_error",
    )

    def __init__(
        self,
        min_qubits: int | None = None,
        min_t1_us: float | None = None,
        min_t2_us: float | None = None,
        max_readout_error: float | None = None,
        max_gate_error: float | None = None,
        clock: Callable[[], datetime] = utc_now,
    ):
        self._criteria = {
            "min_qubits": min_qubits,
            "min_t1_us": min_t1_us,
            "min_t2_us": min_t2_us,
            "max_readout_error": max_readout_error,
            "max_gate_error": max_gate_error,
        }
        if all(v is None for v in self._criteria.values()):
            raise ValueError("at least one criterion must be set")
        self._clock = clock

    def name(self) -> str:
        return "CalibrationConstraint"

    def evaluate(self, adapter: BackendAdapter, shots: int) -> IntrospectionResult:
        snapshot = adapter.calibration()
        scores: dict[str, float] = {}
        passed = True

        limit = self._criteria["min_qubits"]
        if limit is not None:
            scores["num_qubits"] = float(snapshot.num_qubits)
            passed &= snapshot.num_qubits >= limit

        limit = self._criteria["min_t1_us"]
        if limit is not None:
            worst = min(q.t1_us for q in snapshot.qubits)
            scores["worst_t1_us"] = worst
            passed &= worst >= limit

        limit = self._criteria["min_t2_us"]
        if limit is not None:
            worst = min(q.t2_us for q in snapshot.qubits)
            scores["worst_t2_us"] = worst
            passed &= worst >= limit

        limit = self._criteria["max_readout_error"]
        if limit is not None:
            worst = max(q.readout_error for q in snapshot.qubits)
            scores["worst_readout_error"] = worst
            passed &= worst <= limit

        limit = self._criteria["max_gate_error"]
        if limit is not None and snapshot.gates:
            worst = max(g.error for g in snapshot.gates)
            scores["worst_gate_error"] = worst
            passed &= worst <= limit

        return IntrospectionResult(
            constraint_name=self.name(),
            passed=bool(passed),
            scores=scores,
            evaluated_at=self._clock(),
        )


class AndConstraint(ResourceConstraint):
    """Passes iff every child passes.

    Short-circuits on the first failure by default, because each child
    evaluation may spend paid shots; later children then never run and are
    absent from ``children``.  ``evaluate_all=True`` trades that economy for
    a complete report.
    """

    def __init__(
        self,
        children: Iterable[ResourceConstraint],
        evaluate_all: bool = False,
        clock: Callable[[], datetime] = utc_now,
    ):
        self._children = tuple(children)
        if not self._children:
            raise ValueError("AndConstraint requires at least one child")
        self._evaluate_all = evaluate_all
        self._clock = clock

    def name(self) -> str:
        return "AndConstraint"

    def evaluate(self, adapter: BackendAdapter, shots: int) -> IntrospectionResult:
        evaluated: list[IntrospectionResult] = []
        passed = True
        for child in self._children:
            outcome = child.evaluate(adapter, shots)
            evaluated.append(outcome)
            if not outcome.passed:
                passed = False
                if not self._evaluate_all:
                    break
        return IntrospectionResult(
            constraint_name=self.name(),
            passed=passed,
            evaluated_at=self._clock(),
            children=tuple(evaluated),
        )


class OrConstraint(ResourceConstraint):
    """Passes iff any child passes; short-circuits on the first success."""

    def __init__(
        self,
        children: Iterable[ResourceConstraint],
        evaluate_all: bool = False,
        clock: Callable[[], datetime] = utc_now,
    ):
        self._children = tuple(children)
        if not self._children:
            raise ValueError("OrConstraint requires at least one child")
        self._evaluate_all = evaluate_all
        self._clock = clock

    def name(self) -> str:
        return "OrConstraint"

    def evaluate(self, adapter: BackendAdapter, shots: int) -> IntrospectionResult:
        evaluated: list[IntrospectionResult] = []
        passed = False
        for child in self._children:
            outcome = child.evaluate(adapter, shots)
            evaluated.append(outcome)
            if outcome.passed:
                passed = True
                if not self._evaluate_all:
                    break
        return IntrospectionResult(
            constraint_name=self.name(),
            passed=passed,
            evaluated_at=self._clock(),
            children=tuple(evaluated),
        )


class NotConstraint(ResourceConstraint):
    """Inverts its child's outcome."""

    def __init__(
        self, child: ResourceConstraint, clock: Callable[[], datetime] = utc_now
    ):
        self._child = child
        self._clock = clock

    def name(self) -> str:
        return "NotConstraint"

    def evaluate(self, adapter: BackendAdapter, shots: int) -> IntrospectionResult:
        outcome = self._child.evaluate(adapter, shots)
        return IntrospectionResult(
            constraint_name=self.name(),
            passed=not outcome.passed,
            evaluated_at=self._clock(),
            children=(outcome,),
        )


class FreshWithin(ResourceConstraint):
    """TTL cache around a child constraint.

    Introspection and use of its result are separated in time; this wrapper
    bounds that gap.  The child result is cached and reused while
    ``now - evaluated_at <= ttl``; past the ttl the child is re-evaluated.
    The cached result is returned as-is, original ``evaluated_at`` included,
    so callers can see exactly how stale their information is.  Errors do
    not populate the cache.

    Safe under concurrent ``evaluate`` calls: the lock admits at most one
    child evaluation at a time, and concurrent callers observe the cached
    value once it lands.
    """

    def __init__(
        self,
        child: ResourceConstraint,
        ttl: timedelta,
        clock: Callable[[], datetime] = utc_now,
    ):
        if ttl <= timedelta(0):
            raise ValueError(f"ttl must be positive, got {ttl!r}")
        self._child = child
        self._ttl = ttl
        self._clock = clock
        self._lock = threading.Lock()
        self._cached: IntrospectionResult | None = None

    def name(self) -> str:
        return f"FreshWithin({self._child.name()})"

    def evaluate(self, adapter: BackendAdapter, shots: int) -> IntrospectionResult:
        with self._lock:
            if self._cached is not None:
                age = self._clock() - self._cached.evaluated_at
                if age <= self._ttl:
                    return self._cached
            outcome = self._child.evaluate(adapter, shots)
            self._cached = outcome
            return outcome


# --- document format -------------------------------------------------------
#
# { "type": "packed_chsh" | "calibration" | "and" | "or" | "not" | "fresh_within",
#   "policy": {"kind": "min"|"max", "threshold": number}?,   (packed_chsh)
#   "criteria": {...}?,                                      (calibration)
#   "children": [...]?,                                      (composites, not, fresh_within)
#   "ttl_seconds": number? }                                 (fresh_within)

_ALLOWED_KEYS = {
    "packed_chsh": {"type", "policy"},
    "calibration": {"type", "criteria"},
    "and": {"type", "children"},
    "or": {"type", "children"},
    "not": {"type", "children"},
    "fresh_within": {"type", "children", "ttl_seconds"},
}


def _check_keys(doc: Mapping[str, Any], kind: str, path: str):
    unknown = set(doc) - _ALLOWED_KEYS[kind]
    if unknown:
        raise DocumentError(path, f"unknown field(s) for type {kind!r}: {sorted(unknown)}")


def _child_docs(doc: Mapping[str, Any], path: str, exactly: int | None = None) -> list:
    if "children" not in doc:
        raise DocumentError(f"{path}.children", "required field missing")
    children = doc["children"]
    if not isinstance(children, list) or not children:
        raise DocumentError(f"{path}.children", "expected a non-empty list")
    if exactly is not None and len(children) != exactly:
        raise DocumentError(
            f"{path}.children", f"expected exactly {exactly} child(ren), got {len(children)}"
        )
    return children


def constraint_from_dict(
    doc: Mapping[str, Any],
    path: str = "constraint",
    clock: Callable[[], datetime] = utc_now,
) -> ResourceConstraint:
    """Build a constraint tree from its document form.

    Malformed documents raise :class:`DocumentError` naming the offending
    field.  ``clock`` is threaded through to every node so whole trees can
    run against synthetic time.
    """
    if not isinstance(doc, Mapping):
        raise DocumentError(path, f"expected an object, got {type(doc).__name__}")
    kind = doc.get("type")
    if kind not in _ALLOWED_KEYS:
        raise DocumentError(
            f"{path}.type", f"unknown constraint type {kind!r}"
        )
    _check_keys(doc, kind, path)

    if kind == "packed_chsh":
        if "policy" not in doc:
            raise DocumentError(f"{path}.policy", "required field missing")
        raw_policy = doc["policy"]
        if not isinstance(raw_policy, Mapping):
            raise DocumentError(f"{path}.policy", "expected an object")
        unknown = set(raw_policy) - {"kind", "threshold"}
        if unknown:
            raise DocumentError(f"{path}.policy", f"unknown field(s): {sorted(unknown)}")
        policy_kind = raw_policy.get("kind")
        if policy_kind not in ("min", "max"):
            raise DocumentError(
                f"{path}.policy.kind", f"expected \"min\" or \"max\", got {policy_kind!r}"
            )
        threshold = raw_policy.get("threshold")
        if isinstance(threshold, bool) or not isinstance(threshold, (int, float)):
            raise DocumentError(
                f"{path}.policy.threshold", f"expected a number, got {threshold!r}"
            )
        policy: Policy = (
            MinimumAcceptableValue(float(threshold))
            if policy_kind == "min"
            else MaximumAcceptableValue(float(threshold))
        )
        return PackedCHSHTest(policy, clock=clock)

    if kind == "calibration":
        if "criteria" not in doc:
            raise DocumentError(f"{path}.criteria", "required field missing")
        criteria = doc["criteria"]
        if not isinstance(criteria, Mapping) or not criteria:
            raise DocumentError(f"{path}.criteria", "expected a non-empty object")
        unknown = set(criteria) - set(CalibrationConstraint._CRITERIA)
        if unknown:
            raise DocumentError(
                f"{path}.criteria", f"unknown criterion(s): {sorted(unknown)}"
            )
        for key, value in criteria.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise DocumentError(
                    f"{path}.criteria.{key}", f"expected a number, got {value!r}"
                )
        kwargs = {key: criteria[key] for key in criteria}
        if "min_qubits" in kwargs:
            kwargs["min_qubits"] = int(kwargs["min_qubits"])
        return CalibrationConstraint(clock=clock, **kwargs)

    if kind in ("and", "or"):
        children = [
            constraint_from_dict(c, f"{path}.children[{i}]", clock)
            for i, c in enumerate(_child_docs(doc, path))
        ]
        cls = AndConstraint if kind == "and" else OrConstraint
        return cls(children, clock=clock)

    if kind == "not":
        child_doc = _child_docs(doc, path, exactly=1)[0]
        return NotConstraint(
            constraint_from_dict(child_doc, f"{path}.children[0]", clock), clock=clock
        )

    # fresh_within
    child_doc = _child_docs(doc, path, exactly=1)[0]
    ttl = doc.get("ttl_seconds")
    if isinstance(ttl, bool) or not isinstance(ttl, (int, float)):
        raise DocumentError(f"{path}.ttl_seconds", f"expected a number, got {ttl!r}")
    if ttl <= 0:
        raise DocumentError(f"{path}.ttl_seconds", f"must be positive, got {ttl}")
    return FreshWithin(
        constraint_from_dict(child_doc, f"{path}.children[0]", clock),
        ttl=timedelta(seconds=float(ttl)),
        clock=clock,
    )
