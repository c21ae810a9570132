"""Lax centrality as executable artifacts.

alpha laxly centralizes mu (w.r.t. HSP(K)) when some onto pi: C -> B carries
congruences beta, gamma with beta meet gamma = bottom, push(pi,beta) >= mu and
push(pi,gamma) >= alpha.  The decision procedure is staged and tri-state:
quantifying over all of HSP(K) admits no size bound, so Unknown is a
first-class outcome.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np

from .congruences import (
    Congruence,
    con_lattice,
    is_modular_lattice,
    push_forward,
    quotient,
)
from .core import (
    FiniteAlgebra,
    Homomorphism,
    _subuniverses_capped,
    direct_product,
    find_onto_map,
    generating_set,
    subalgebra_generated,
)
from .errors import (
    BudgetExceeded,
    MismatchedCarriers,
    ModularAssertionWarning,
    NotInVariety,
)
from .free import free_algebra, free_intersection_full, modular_witness, tc_commutator
from .options import Budgets, DecideOptions
from .witness import LaxWitness, SPEmbedding


def verify_witness(w: LaxWitness, B: FiniteAlgebra, mu: Congruence, alpha: Congruence):
    """(ok, diagnostic); the diagnostic names the first failed clause."""
    if w.pi.target != B:
        raise MismatchedCarriers("witness maps onto a different algebra")
    if mu.algebra != B or alpha.algebra != B:
        raise MismatchedCarriers("mu/alpha do not live on B")
    if not w.pi.is_onto():
        return False, "pi is not onto"
    if not w.beta.meet(w.gamma).is_bottom():
        return False, "beta meet gamma is not bottom"
    if not mu.leq(push_forward(w.pi, w.beta)):
        return False, "push(pi, beta) does not contain mu"
    if not alpha.leq(push_forward(w.pi, w.gamma)):
        return False, "push(pi, gamma) does not contain alpha"
    return True, "ok"


def trivial_witness(B: FiniteAlgebra, mu: Congruence, alpha: Congruence) -> LaxWitness:
    """(C=B, pi=id, beta=mu, gamma=alpha); verifies exactly when mu meet alpha = bottom."""
    return LaxWitness(B, Homomorphism.identity(B), mu, alpha)


def normalize_witness(w: LaxWitness) -> LaxWitness:
    """Quotient C by beta meet gamma, preserving every other witness clause."""
    from .errors import NotNormalizable

    delta = w.beta.meet(w.gamma)
    if not delta.leq(w.pi.kernel()):
        raise NotNormalizable("beta meet gamma is not below ker pi")
    q = quotient(w.C, delta)
    reps = np.unique(delta.labels)
    pi2 = Homomorphism(q.algebra, w.pi.target, w.pi.map[reps], _trusted=True)
    return LaxWitness(q.algebra, pi2,
                      push_forward(q.nat, w.beta), push_forward(q.nat, w.gamma))


@dataclass
class SearchReport:
    """What the bounded witness search looked at before giving up."""

    products_examined: int = 0
    products_skipped: int = 0
    candidates_examined: int = 0
    pairs_examined: int = 0
    subuniverses_truncated: bool = False
    onto_budget_hits: int = 0
    lattice_budget_hits: int = 0
    pair_budget_exhausted: bool = False

    def truncated(self) -> bool:
        return (self.subuniverses_truncated or self.onto_budget_hits > 0
                or self.lattice_budget_hits > 0 or self.pair_budget_exhausted
                or self.products_skipped > 0)

    def render(self) -> str:
        flags = []
        if self.subuniverses_truncated:
            flags.append("subuniverses-truncated")
        if self.onto_budget_hits:
            flags.append(f"onto-budget-hits={self.onto_budget_hits}")
        if self.lattice_budget_hits:
            flags.append(f"lattice-budget-hits={self.lattice_budget_hits}")
        if self.pair_budget_exhausted:
            flags.append("pair-budget-exhausted")
        return (f"products={self.products_examined} skipped={self.products_skipped} "
                f"candidates={self.candidates_examined} pairs={self.pairs_examined}"
                + ("" if not flags else " " + " ".join(flags)))


@dataclass(frozen=True)
class CentralityVerdict:
    """Yes carries a re-verifiable witness; No exists only under modular_assert."""

    kind: str  # "yes" | "no" | "unknown"
    witness: LaxWitness | None = None
    method: str | None = None
    reason: str | None = None
    report: SearchReport | None = None
    free_intersection: Congruence | None = None
    tc: Congruence | None = None
    modularity_refuted: bool = False

    @property
    def is_yes(self):
        return self.kind == "yes"

    @property
    def is_no(self):
        return self.kind == "no"

    @property
    def is_unknown(self):
        return self.kind == "unknown"


def _candidate_pairs(B, K, budgets: Budgets, report: SearchReport):
    """(C, pi) candidates: subalgebras of small products of K with onto maps to B.

    Products of fewer factors first, then lexicographic on the factor multiset;
    subalgebras by size then elements; onto maps in assignment order.
    """
    for nfac in range(1, budgets.max_witness_factors + 1):
        for combo in itertools.combinations_with_replacement(range(len(K)), nfac):
            try:
                product = direct_product([K[i] for i in combo], budgets=budgets)
            except BudgetExceeded:
                report.products_skipped += 1
                continue
            if product.size > budgets.max_candidate_size:
                report.products_skipped += 1
                continue
            report.products_examined += 1
            subs, truncated = _subuniverses_capped(product, budgets.max_subuniverses)
            if truncated:
                report.subuniverses_truncated = True
            for elements in subs:
                if len(elements) < B.size:
                    continue
                sub = subalgebra_generated(product, elements)
                try:
                    pi = find_onto_map(sub.algebra, B, budgets)
                except BudgetExceeded:
                    report.onto_budget_hits += 1
                    continue
                if pi is None:
                    continue
                report.candidates_examined += 1
                yield sub.algebra, pi


def _minimal_lifts(lattice, pi, target: Congruence):
    """Minimal congruences of pi's source whose push-forward contains `target`.

    The satisfying set is an up-set (push_forward is monotone), so scanning
    pairs of minimal elements loses no witnesses.
    """
    sats = [c for c in lattice if target.leq(push_forward(pi, c))]
    return [c for c in sats if not any(o != c and o.leq(c) for o in sats)]


def decide_lax_centrality(B: FiniteAlgebra, mu: Congruence, alpha: Congruence, K,
                          options: DecideOptions | None = None) -> CentralityVerdict:
    """Staged tri-state decision; the No branch exists only under modular_assert."""
    options = options or DecideOptions()
    budgets = options.budgets
    if mu.algebra != B or alpha.algebra != B:
        raise MismatchedCarriers("mu/alpha do not live on B")

    # (1) bottom alpha is always laxly centralized
    if alpha.is_bottom():
        w = LaxWitness(B, Homomorphism.identity(B), mu, alpha)
        return CentralityVerdict("yes", witness=w, method="trivial")

    freeint = None
    if options.use_free_intersection:
        try:
            fi = free_intersection_full(B, mu, alpha, K, budgets)
        except BudgetExceeded:
            fi = None
        if fi is not None:
            freeint = fi.value
            if fi.value.is_bottom():
                # (2) F/(mu_bar meet alpha_bar) with the map induced by zeta
                delta = fi.alpha_bar.meet(fi.beta_bar)
                q = quotient(fi.free.algebra, delta)
                reps = np.unique(delta.labels)
                pi = Homomorphism(q.algebra, B, fi.zeta.map[reps])
                w = LaxWitness(q.algebra, pi,
                               push_forward(q.nat, fi.alpha_bar),
                               push_forward(q.nat, fi.beta_bar))
                ok, why = verify_witness(w, B, mu, alpha)
                if not ok:
                    raise RuntimeError(f"free-intersection witness failed: {why}")
                return CentralityVerdict("yes", witness=w, method="free-intersection",
                                         free_intersection=freeint)

    modularity_refuted = False
    tc = None
    if options.modular_assert:
        tc = tc_commutator(B, mu, alpha, budgets)
        if tc.is_bottom():
            # (3) Theorem about the modular case: the pushout quadruple must verify
            w = modular_witness(B, mu, alpha, budgets)
            ok, why = verify_witness(w, B, mu, alpha)
            if ok:
                return CentralityVerdict("yes", witness=w, method="modular-commutator",
                                         free_intersection=freeint, tc=tc)
            # the pushout witness can only fail when the variety is not modular
            modularity_refuted = True
            warnings.warn("modular_assert refuted: the pushout witness does not verify",
                          ModularAssertionWarning)
        else:
            # (4) under the modularity assertion a nonzero commutator is a No
            return CentralityVerdict(
                "no", method="modular-commutator", free_intersection=freeint, tc=tc,
                reason=f"commutator is not bottom: {tc.blocks()}")

    # (5) bounded search over subalgebras of small products of K
    report = SearchReport()
    if options.use_search:
        for C, pi in _candidate_pairs(B, K, budgets, report):
            try:
                lattice = con_lattice(C, budgets.with_overrides(
                    max_lattice_algebra=budgets.max_candidate_size))
            except BudgetExceeded:
                report.lattice_budget_hits += 1
                continue
            lift_beta = _minimal_lifts(lattice, pi, mu)
            lift_gamma = _minimal_lifts(lattice, pi, alpha)
            for b in lift_beta:
                for g in lift_gamma:
                    report.pairs_examined += 1
                    if report.pairs_examined > budgets.max_pair_checks:
                        report.pair_budget_exhausted = True
                        return CentralityVerdict(
                            "unknown", report=report, free_intersection=freeint, tc=tc,
                            modularity_refuted=modularity_refuted, method="exhausted")
                    if b.meet(g).is_bottom():
                        w = LaxWitness(C, pi, b, g)
                        ok, why = verify_witness(w, B, mu, alpha)
                        if not ok:
                            raise RuntimeError(f"search witness failed: {why}")
                        return CentralityVerdict(
                            "yes", witness=w, method="search",
                            free_intersection=freeint, tc=tc,
                            modularity_refuted=modularity_refuted, report=report)

    # (6) out of ideas within budget
    return CentralityVerdict("unknown", report=report, free_intersection=freeint,
                             tc=tc, modularity_refuted=modularity_refuted,
                             method="exhausted")


@dataclass(frozen=True)
class MaxCentEntry:
    alpha: Congruence
    verdict: CentralityVerdict
    inherited: bool


@dataclass(frozen=True)
class MaxCentResult:
    """Maximal laxly-centralizing congruences; completeness means no Unknowns."""

    entries: tuple
    maximal: tuple
    complete: bool
    modularity_refuted: bool

    def verdict_for(self, alpha: Congruence) -> CentralityVerdict:
        for e in self.entries:
            if e.alpha == alpha:
                return e.verdict
        raise KeyError("alpha was not evaluated")

    def unknown_above(self, alpha: Congruence) -> bool:
        return any(e.verdict.is_unknown and alpha.leq(e.alpha) and e.alpha != alpha
                   for e in self.entries)


def maximal_lax_centralizers(B: FiniteAlgebra, mu: Congruence, K,
                             options: DecideOptions | None = None) -> MaxCentResult:
    """Evaluate every alpha in Con B top-down; Yes answers prune their down-sets."""
    options = options or DecideOptions()
    lattice = con_lattice(B, options.budgets)
    modularity_refuted = False
    if options.modular_assert and not is_modular_lattice(lattice):
        modularity_refuted = True
        warnings.warn("modular_assert refuted: Con B is not modular",
                      ModularAssertionWarning)
    entries = []
    yes_entries = []
    for alpha in reversed(lattice.elements):
        inherited = None
        for bigger, verdict in yes_entries:
            if alpha.leq(bigger):
                inherited = verdict
                break
        if inherited is not None:
            entries.append(MaxCentEntry(alpha, inherited, True))
            continue
        verdict = decide_lax_centrality(B, mu, alpha, K, options)
        modularity_refuted = modularity_refuted or verdict.modularity_refuted
        entries.append(MaxCentEntry(alpha, verdict, False))
        if verdict.is_yes:
            yes_entries.append((alpha, verdict))
    yes_set = [e.alpha for e in entries if e.verdict.is_yes]
    maximal = [a for a in yes_set
               if not any(b != a and a.leq(b) for b in yes_set)]
    maximal.sort(key=lambda c: (-c.num_blocks, tuple(c.labels)))
    complete = not any(e.verdict.is_unknown for e in entries)
    return MaxCentResult(tuple(entries), tuple(maximal), complete, modularity_refuted)


def trivial_commutator(B: FiniteAlgebra, mu: Congruence, alpha: Congruence, K,
                       options: DecideOptions | None = None):
    """The two-valued commutator candidate: bottom on Yes, top on No, None on Unknown."""
    verdict = decide_lax_centrality(B, mu, alpha, K, options)
    if verdict.is_yes:
        return Congruence.bottom(B), verdict
    if verdict.is_no:
        return Congruence.top(B), verdict
    return None, verdict


@dataclass(frozen=True)
class WitnessMeetResult:
    value: Congruence
    exact: bool
    quadruples: int
    report: SearchReport


def witness_meet_commutator(B: FiniteAlgebra, mu: Congruence, alpha: Congruence, K,
                            options: DecideOptions | None = None) -> WitnessMeetResult:
    """Meet of push(pi, beta meet gamma) over enumerated quadruples with
    push(pi,beta) >= mu and push(pi,gamma) >= alpha.

    Always includes the identity quadruple on B and the pair-algebra quadruple
    from the modular construction; exact only under modular_assert.
    """
    options = options or DecideOptions()
    budgets = options.budgets
    value = mu.meet(alpha)  # identity quadruple (B, id, mu, alpha)
    count = 1
    from .free import b_mu, delta_congruence

    bm = b_mu(B, mu, budgets)
    gamma = delta_congruence(B, mu, alpha, pair_algebra=bm, budgets=budgets)
    value = value.meet(push_forward(bm.pi, bm.pi_mu.kernel().meet(gamma)))
    count += 1
    report = SearchReport()
    for C, pi in _candidate_pairs(B, K, budgets, report):
        try:
            lattice = con_lattice(C, budgets.with_overrides(
                max_lattice_algebra=budgets.max_candidate_size))
        except BudgetExceeded:
            report.lattice_budget_hits += 1
            continue
        for b in _minimal_lifts(lattice, pi, mu):
            for g in _minimal_lifts(lattice, pi, alpha):
                report.pairs_examined += 1
                if report.pairs_examined > budgets.max_pair_checks:
                    report.pair_budget_exhausted = True
                    return WitnessMeetResult(value, options.modular_assert, count, report)
                value = value.meet(push_forward(pi, b.meet(g)))
                count += 1
    return WitnessMeetResult(value, options.modular_assert, count, report)


@dataclass(frozen=True)
class SpCover:
    """An SP(K) algebra with an onto map to a quotient, plus its embedding."""

    algebra: FiniteAlgebra
    onto: Homomorphism
    embedding: SPEmbedding


def _sp_cover(Q: FiniteAlgebra, K, budgets: Budgets) -> SpCover:
    """Find S in SP(K) with an onto map S -> Q.

    Searches subalgebras of small products first (cheap, certificate-friendly),
    then falls back to the free algebra on a generating set of Q, whose
    realization is itself an explicit subproduct of K-members.
    """
    # product-subalgebra search, inlined to keep the ambient product around
    if Q.size <= budgets.max_candidate_size:
        for nfac in range(1, budgets.max_witness_factors + 1):
            for combo in itertools.combinations_with_replacement(range(len(K)), nfac):
                try:
                    product = direct_product([K[i] for i in combo], budgets=budgets)
                except BudgetExceeded:
                    continue
                if product.size > budgets.max_candidate_size:
                    continue
                subs, _ = _subuniverses_capped(product, budgets.max_subuniverses)
                for elements in subs:
                    if len(elements) < Q.size:
                        continue
                    sub = subalgebra_generated(product, elements)
                    try:
                        pi = find_onto_map(sub.algebra, Q, budgets)
                    except BudgetExceeded:
                        continue
                    if pi is None:
                        continue
                    rows = np.asarray([product.decode(e) for e in elements],
                                      dtype=np.int32).reshape(len(elements), len(combo))
                    embedding = SPEmbedding(sub.algebra, tuple(K[i] for i in combo), rows)
                    return SpCover(sub.algebra, pi, embedding)
    gens = generating_set(Q)
    free = free_algebra(K, len(gens), budgets=budgets)
    hom, refutation = free.hom_or_refute(gens, Q)
    if hom is None:
        raise NotInVariety(
            f"quotient is outside HSP(K): {refutation.render(free.generators)}")
    if not hom.is_onto():
        raise RuntimeError("freeness map misses a generator")
    return SpCover(free.algebra, hom, free.embedding())


@dataclass(frozen=True)
class SpNormalization:
    """Lemma-style SP normal form of a witness, with the connecting maps."""

    witness: LaxWitness
    pi1: Homomorphism
    nu_beta: Homomorphism
    nu_gamma: Homomorphism
    cover_beta: SpCover
    cover_gamma: SpCover


def sp_normalize_witness(w: LaxWitness, K, *, mu: Congruence | None = None,
                         alpha: Congruence | None = None,
                         budgets: Budgets | None = None) -> SpNormalization:
    """Rebuild a verifying witness whose C/beta and C/gamma embed into explicit
    products of K-members, via the triple pullback construction."""
    budgets = budgets or Budgets()
    B = w.pi.target
    if mu is not None and alpha is not None:
        ok, why = verify_witness(w, B, mu, alpha)
        if not ok:
            raise MismatchedCarriers(f"witness does not verify: {why}")
    c0 = w.C
    q_beta = quotient(c0, w.beta)
    q_gamma = quotient(c0, w.gamma)
    cover_beta = _sp_cover(q_beta.algebra, K, budgets)
    cover_gamma = _sp_cover(q_gamma.algebra, K, budgets)
    triples = []
    fib_beta = {}
    for b in range(cover_beta.algebra.size):
        fib_beta.setdefault(int(cover_beta.onto(b)), []).append(b)
    fib_gamma = {}
    for g in range(cover_gamma.algebra.size):
        fib_gamma.setdefault(int(cover_gamma.onto(g)), []).append(g)
    for c in range(c0.size):
        for b in fib_beta.get(int(q_beta.nat(c)), ()):
            for g in fib_gamma.get(int(q_gamma.nat(c)), ()):
                triples.append((c, b, g))
    if len(triples) * 3 > budgets.max_free_cells:
        raise BudgetExceeded("triple pullback too large")
    from .core import close_in_product

    closed = close_in_product([c0, cover_beta.algebra, cover_gamma.algebra],
                              triples or np.zeros((0, 3), dtype=np.int32),
                              order="ambient", max_rows=max(1, len(triples)),
                              budgets=budgets)
    C = closed.algebra
    assert C.size == len(triples), "pullback must already be closed"
    rows = closed.rows
    pi1 = Homomorphism(C, c0, rows[:, 0], _trusted=True)
    nu_beta = Homomorphism(C, cover_beta.algebra, rows[:, 1], _trusted=True)
    nu_gamma = Homomorphism(C, cover_gamma.algebra, rows[:, 2], _trusted=True)
    beta = nu_beta.kernel()
    gamma = nu_gamma.kernel()
    pi = w.pi.compose(pi1)
    cert_beta = _quotient_embedding(C, beta, nu_beta, cover_beta)
    cert_gamma = _quotient_embedding(C, gamma, nu_gamma, cover_gamma)
    out = LaxWitness(C, pi, beta, gamma, sp_beta=cert_beta, sp_gamma=cert_gamma)
    if mu is not None and alpha is not None:
        ok, why = verify_witness(out, B, mu, alpha)
        if not ok:
            raise RuntimeError(f"sp-normalized witness failed verification: {why}")
    return SpNormalization(out, pi1, nu_beta, nu_gamma, cover_beta, cover_gamma)


def _quotient_embedding(C, theta, nu, cover: SpCover) -> SPEmbedding:
    """C/theta embeds into cover's product: theta = ker nu and nu is onto."""
    q = quotient(C, theta)
    reps = np.unique(theta.labels)
    iso = nu.map[reps]  # block -> cover element, bijective
    rows = np.asarray(cover.embedding.rows)[iso]
    return SPEmbedding(q.algebra, cover.embedding.factors, rows)
