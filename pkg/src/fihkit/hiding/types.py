"""Plan, result and descriptor records shared by every hiding algorithm."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..dataset import TransactionDatabase

KINDS = ("border-heuristic", "ilp", "hybrid", "external")


class HidingError(RuntimeError):
    """An algorithm failed; the message carries the algorithm id."""


class RegistryError(KeyError):
    pass


class PlanError(ValueError):
    """A plan names a missing (tid, item) pair or repeats one."""


class ExternalAlgorithmError(HidingError):
    def __init__(self, message, stdout="", stderr="", returncode=None):
        super().__init__(message)
        self.stdout = stdout
        self.stderr = stderr
        self.returncode = returncode


@dataclass
class SanitizationPlan:
    deletions: list = field(default_factory=list)
    algorithm_id: str = ""
    wall_time: float = 0.0

    def __post_init__(self):
        self.deletions = [(int(t), int(i)) for t, i in self.deletions]

    def __len__(self):
        return len(self.deletions)

    def sorted_pairs(self) -> list:
        return sorted(self.deletions)

    @property
    def touched(self) -> list:
        return sorted({t for t, _ in self.deletions})


@dataclass
class HidingResult:
    plan: SanitizationPlan
    sanitized: TransactionDatabase
    notes: list = field(default_factory=list)


@dataclass(frozen=True)
class AlgorithmDescriptor:
    id: str
    kind: str
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown algorithm kind {self.kind!r}")
        if isinstance(self.params, dict):
            object.__setattr__(self, "params", tuple(sorted(self.params.items())))

    @property
    def options(self) -> dict:
        return dict(self.params)
