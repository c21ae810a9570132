"""Variety membership with certificates and the finite-instance pipeline for the
generalized Jónsson property.

For a finite class K of finite algebras every ultrafilter over the finite index
set of the proof is principal, so "ultraproduct of members" collapses to
"member": conclusion checks run as B/alpha in HS(A) for some A in K, with
explicit subuniverse-plus-onto-map certificates.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

from .congruences import Congruence, con_lattice, format_blocks, monolith_and_si, quotient
from .core import (
    FiniteAlgebra,
    Homomorphism,
    enumerate_subuniverses,
    find_onto_map,
    generating_set,
    subalgebra_generated,
)
from .centrality import MaxCentResult, maximal_lax_centralizers
from .errors import (
    InputError,
    NotInHSP,
    NotSubdirectlyIrreducible,
    SignatureMismatch,
)
from .free import FreePresentation, Refutation, free_algebra
from .options import Budgets, DecideOptions


@dataclass(frozen=True)
class HspCertificate:
    """B is a homomorphic image of the free algebra on a generating set of B."""

    free: FreePresentation
    onto: Homomorphism
    generators: tuple

    @property
    def positive(self):
        return True

    def verify(self):
        self.onto.revalidate()
        assert self.onto.is_onto()
        for j, g in enumerate(self.free.gen_indices):
            assert self.onto(int(g)) == self.generators[j]
        return True


@dataclass(frozen=True)
class HsCertificate:
    """B is an onto image of the subalgebra of A on `subuniverse`."""

    source: FiniteAlgebra
    subuniverse: tuple
    subalgebra: FiniteAlgebra
    onto: Homomorphism
    factor_index: int = 0

    @property
    def positive(self):
        return True

    def verify(self):
        sub = subalgebra_generated(self.source, self.subuniverse)
        assert sub.elements == self.subuniverse, "subuniverse is not closed"
        assert sub.algebra == self.subalgebra
        self.onto.revalidate()
        assert self.onto.is_onto()
        return True


@dataclass(frozen=True)
class NegativeCertificate:
    """Either a refuting identity (HSP) or an exhaustion record (HS)."""

    kind: str  # "identity" | "exhaustion"
    refutation: Refutation | None = None
    free: FreePresentation | None = None
    assignment: tuple = ()
    detail: str = ""

    @property
    def positive(self):
        return False

    def verify_against(self, B: FiniteAlgebra, K):
        """A refuting identity must hold across K and fail in B."""
        assert self.kind == "identity"
        n = len(self.assignment)
        for a in K:
            for point in itertools.product(range(a.size), repeat=n):
                assert (self.refutation.lhs.evaluate(a, point)
                        == self.refutation.rhs.evaluate(a, point))
        assert (self.refutation.lhs.evaluate(B, self.assignment)
                != self.refutation.rhs.evaluate(B, self.assignment))
        return True

    def render(self):
        if self.kind == "identity":
            return self.refutation.render(self.free.generators)
        return self.detail


def hsp_membership(B: FiniteAlgebra, K, budgets: Budgets | None = None):
    """Membership in HSP(K) via the extension property of the free algebra on a
    generating set of B; positive and negative outcomes both carry certificates."""
    budgets = budgets or Budgets()
    K = list(K)
    if not K:
        raise InputError("hsp_membership needs a nonempty class")
    for a in K:
        if a.signature != B.signature:
            raise SignatureMismatch("class member signature differs from B's")
    gens = generating_set(B)
    free = free_algebra(K, len(gens), budgets=budgets)
    hom, refutation = free.hom_or_refute(gens, B)
    if hom is None:
        return NegativeCertificate(kind="identity", refutation=refutation, free=free,
                                   assignment=tuple(gens))
    if B.size and not hom.is_onto():
        raise RuntimeError("freeness extension misses a generator")
    return HspCertificate(free=free, onto=hom, generators=tuple(gens))


def hs_membership(B: FiniteAlgebra, A: FiniteAlgebra, budgets: Budgets | None = None,
                  factor_index: int = 0):
    """B in HS(A): some subalgebra of A maps onto B."""
    budgets = budgets or Budgets()
    if A.signature != B.signature:
        raise SignatureMismatch("algebras have different signatures")
    examined = 0
    for elements in enumerate_subuniverses(A, budgets):
        if len(elements) < B.size:
            continue
        examined += 1
        sub = subalgebra_generated(A, elements)
        pi = find_onto_map(sub.algebra, B, budgets)
        if pi is not None:
            return HsCertificate(source=A, subuniverse=elements, subalgebra=sub.algebra,
                                 onto=pi, factor_index=factor_index)
    return NegativeCertificate(kind="exhaustion",
                               detail=f"exhausted {examined} subuniverses of size >= {B.size}")


def si_quotients(A: FiniteAlgebra, budgets: Budgets | None = None):
    """(theta, A/theta) for every completely meet-irreducible theta in Con A.

    In a finite lattice those are exactly the elements with one upper cover;
    each quotient is subdirectly irreducible with monolith cover/theta.
    """
    lattice = con_lattice(A, budgets)
    out = []
    for i, theta in enumerate(lattice.elements):
        if theta.is_top():
            continue
        if len(lattice.upper_covers(i)) == 1:
            out.append((theta, quotient(A, theta).algebra))
    return out


@dataclass(frozen=True)
class ConclusionEntry:
    alpha: Congruence
    status: str  # "PASS" | "FAIL" | "INCONCLUSIVE"
    certificate: object = None
    negatives: tuple = ()
    note: str = ""


@dataclass(frozen=True)
class JonssonReport:
    """End-to-end record of one finite instance check of the main theorem."""

    algebra_label: str
    class_labels: tuple
    algebra: FiniteAlgebra
    hsp: HspCertificate
    monolith: Congruence
    maxcent: MaxCentResult
    conclusions: tuple
    outcome: str  # "PASS" | "FAIL" | "INCONCLUSIVE" | "NO-COMPLETE-MAXIMAL"
    modular_assert: bool
    elapsed: float

    def to_text(self, include_timing=False) -> str:
        lines = [
            f"algebra: {self.algebra_label} (size {self.algebra.size})",
            f"class: {' '.join(self.class_labels)}",
            f"modular_assert: {'true' if self.modular_assert else 'false'}",
            "hsp: positive",
            "si: true",
            f"monolith: {format_blocks(self.monolith)}",
            f"congruences: {len(self.maxcent.entries)}",
            "verdicts:",
        ]
        for e in reversed(self.maxcent.entries):  # bottom-up for readability
            how = "inherited" if e.inherited else e.verdict.method
            lines.append(f"  {format_blocks(e.alpha)}: {e.verdict.kind} ({how})")
        lines.append("maximal: " + "; ".join(format_blocks(c) for c in self.maxcent.maximal))
        lines.append(f"maximality_complete: {'true' if self.maxcent.complete else 'false'}")
        if self.maxcent.modularity_refuted:
            lines.append("warning: modular_assert refuted by a computed lattice")
        lines.append("conclusion:")
        for c in self.conclusions:
            if c.status == "PASS":
                cert = c.certificate
                lines.append(
                    f"  alpha {format_blocks(c.alpha)}: PASS via factor "
                    f"{cert.factor_index} subuniverse "
                    "{" + ",".join(str(x) for x in cert.subuniverse) + "}")
            elif c.status == "FAIL":
                lines.append(f"  alpha {format_blocks(c.alpha)}: FAIL "
                             "(probable implementation bug; certificates follow)")
                for n in c.negatives:
                    lines.append(f"    {n.render()}")
            else:
                lines.append(f"  alpha {format_blocks(c.alpha)}: INCONCLUSIVE ({c.note})")
        lines.append(f"outcome: {self.outcome}")
        if include_timing:
            lines.append(f"elapsed_seconds: {self.elapsed:.3f}")
        return "\n".join(lines) + "\n"


def jonsson_check(B: FiniteAlgebra, K, options: DecideOptions | None = None,
                  algebra_label: str = "B", class_labels=None) -> JonssonReport:
    """Assert B in HSP(K) and SI, find maximal laxly-centralizing alpha for the
    monolith, and check B/alpha in HS(A) for some A in K."""
    options = options or DecideOptions()
    start = time.perf_counter()
    K = list(K)
    if class_labels is None:
        class_labels = tuple(f"K{i}" for i in range(len(K)))
    hsp = hsp_membership(B, K, options.budgets)
    if not hsp.positive:
        raise NotInHSP(f"B violates {hsp.render()}")
    si, mu = monolith_and_si(B, options.budgets)
    if not si:
        raise NotSubdirectlyIrreducible("B has no monolith")
    maxcent = maximal_lax_centralizers(B, mu, K, options)
    conclusions = []
    for alpha in maxcent.maximal:
        if maxcent.unknown_above(alpha):
            conclusions.append(ConclusionEntry(
                alpha, "INCONCLUSIVE",
                note="maximality rests on unknown verdicts above alpha"))
            continue
        quot = quotient(B, alpha).algebra
        negatives = []
        entry = None
        for idx, a in enumerate(K):
            cert = hs_membership(quot, a, options.budgets, factor_index=idx)
            if cert.positive:
                entry = ConclusionEntry(alpha, "PASS", certificate=cert)
                break
            negatives.append(cert)
        if entry is None:
            entry = ConclusionEntry(alpha, "FAIL", negatives=tuple(negatives))
        conclusions.append(entry)
    statuses = [c.status for c in conclusions]
    if "FAIL" in statuses:
        outcome = "FAIL"
    elif not conclusions or all(s == "INCONCLUSIVE" for s in statuses):
        outcome = "NO-COMPLETE-MAXIMAL"
    elif "INCONCLUSIVE" in statuses:
        outcome = "INCONCLUSIVE"
    else:
        outcome = "PASS"
    return JonssonReport(
        algebra_label=algebra_label, class_labels=tuple(class_labels), algebra=B,
        hsp=hsp, monolith=mu, maxcent=maxcent, conclusions=tuple(conclusions),
        outcome=outcome, modular_assert=options.modular_assert,
        elapsed=time.perf_counter() - start)
