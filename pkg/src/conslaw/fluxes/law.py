"""The conservation-law value type shared by all flux methods."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from ..expr import DiffExpr
from ..multipliers import MultiplierSet

CHARACTERISTIC = "characteristic-identity"
ON_SOLUTIONS = "on-solutions"
UNVERIFIED = "unverified"


@dataclass(frozen=True)
class ConservationLaw:
    fluxes: tuple[DiffExpr, ...]
    method: str
    multipliers: MultiplierSet | None = None
    status: str = UNVERIFIED
    assumptions: tuple[str, ...] = ()
    diagnostics: tuple[str, ...] = ()
    triviality: str | None = None
    weights: object | None = None
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def density(self) -> DiffExpr:
        return self.fluxes[0]

    def with_(self, **kw) -> "ConservationLaw":
        return replace(self, **kw)
