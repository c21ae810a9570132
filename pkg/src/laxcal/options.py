"""Budget and option records threaded through the long-running operations."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace


@dataclass(frozen=True)
class Budgets:
    """Hard resource limits; exceeding one raises BudgetExceeded, never truncates silently."""

    # subuniverse / homomorphism enumeration
    max_subuniverse_algebra: int = 8
    max_subuniverses: int = 10_000
    max_onto_assignments: int = 1_000_000
    # congruence lattices
    max_lattice_algebra: int = 10
    max_lattice_size: int = 200_000
    # free algebras realized in products of powers
    max_free_coords: int = 4096
    max_free_elements: int = 1_000_000
    max_free_cells: int = 1 << 25
    # materialized operation tables of derived algebras
    max_table_cells: int = 1 << 25
    # witness search
    max_witness_factors: int = 3
    max_candidate_size: int = 64
    max_pair_checks: int = 100_000

    def with_overrides(self, **kwargs) -> "Budgets":
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


# environment variables mirroring the CLI budget flags; flags win over the env
_ENV_MAP = {
    "LAXCAL_MAX_FREE_SIZE": "max_free_elements",
    "LAXCAL_MAX_WITNESS_FACTORS": "max_witness_factors",
    "LAXCAL_MAX_LATTICE_SIZE": "max_lattice_algebra",
}


def budgets_from_env(base: Budgets | None = None) -> Budgets:
    base = base or Budgets()
    overrides = {}
    for var, attr in _ENV_MAP.items():
        raw = os.environ.get(var)
        if raw is not None:
            overrides[attr] = int(raw)
    return base.with_overrides(**overrides)


@dataclass(frozen=True)
class DecideOptions:
    """Options for the lax-centrality decision procedure and its callers."""

    modular_assert: bool = False
    budgets: Budgets = field(default_factory=Budgets)
    # stages of decide_lax_centrality that may be switched off for experiments
    use_free_intersection: bool = True
    use_search: bool = True
