"""laxcal: lax centrality and congruence computations on finite algebras."""

from .backend import active_backend
from .core import (
    ClosedSubproduct,
    FiniteAlgebra,
    Homomorphism,
    ProductAlgebra,
    Signature,
    Subalgebra,
    direct_product,
    enumerate_homomorphisms,
    enumerate_onto_maps,
    enumerate_subuniverses,
    find_onto_map,
    generating_set,
    make_algebra,
    make_homomorphism,
    subalgebra_generated,
)
from .congruences import (
    Congruence,
    CongruenceLattice,
    FiniteLattice,
    cg,
    con_lattice,
    is_modular_lattice,
    monolith_and_si,
    pull_back,
    push_forward,
    quotient,
)
from .options import Budgets, DecideOptions, budgets_from_env

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
