"""Named verification suites shared by the CLI and the test-suite.

Each suite returns a CheckResult; ``status`` is PASS, FAIL or
INCONCLUSIVE (truncated evidence about an infinite poset).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .classify import components
from .coxeter import DEFAULT_ELEMENT_BUDGET, INF, bruhat_leq, enumerate_elements, subword_leq_bruteforce
from .errors import NoPartition, SubwordBudget
from .poincare import factors_through, commuting_orbits_condition
from .poset import check_graded, directedness_within, maximal_elements, mobius_matrix
from .topology import DEFAULT_CHAIN_BUDGET, interval_homology
from .twisted import (
    SUBWORD_MAX,
    TwistedBruhat,
    TwistedSystem,
    coxeter_power_upper_bound,
    find_commuting_partition,
)


@dataclass
class CheckResult:
    name: str
    status: str
    details: list[str] = field(default_factory=list)
    witness: Optional[dict] = None

    @property
    def passed(self) -> bool:
        return self.status != "FAIL"

    def lines(self) -> list[str]:
        return [f"{self.name}: {self.status}"] + [f"  {d}" for d in self.details]


@dataclass
class CheckContext:
    ts: TwistedSystem
    max_rank: Optional[int] = None
    budget_elements: int = DEFAULT_ELEMENT_BUDGET
    budget_chains: int = DEFAULT_CHAIN_BUDGET
    _bruhat: Optional[TwistedBruhat] = None

    @property
    def bruhat(self) -> TwistedBruhat:
        if self._bruhat is None:
            self._bruhat = TwistedBruhat(self.ts, self.max_rank, self.budget_elements)
        return self._bruhat

    def truncation_note(self) -> list[str]:
        r = self.bruhat.truncation_rank
        return [] if r is None else [f"truncated at rank {r}"]


def _status(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def check_graded_suite(ctx: CheckContext) -> CheckResult:
    p = ctx.bruhat.poset("iota")
    report = check_graded(p)
    details = ctx.truncation_note() + [f"{len(p)} twisted identities", report.describe(p)]
    witness = None
    if not report.graded:
        witness = {"chains": [[p.label(i) for i in c] for c in report.witness]}
    return CheckResult("graded", _status(report.graded), details, witness)


def check_nof(ctx: CheckContext) -> CheckResult:
    bad = ctx.ts.nof_violations()
    details = [f"odd flipped edge s{a + 1} <-> s{b + 1}" for a, b in bad] or ["no odd edge is flipped"]
    return CheckResult("nof", _status(not bad), details,
                       {"pairs": [[a + 1, b + 1] for a, b in bad]} if bad else None)


def check_full_dichotomy(ctx: CheckContext) -> CheckResult:
    """Every interval: SPHERE(rank gap - 2) when full, ACYCLIC otherwise; mu = reduced Euler char."""
    B = ctx.bruhat
    p = B.poset("iota")
    mu = mobius_matrix(p)
    counts: dict[str, int] = {}
    for u in range(len(p)):
        for v in range(len(p)):
            if not p.less(u, v):
                continue
            h = interval_homology(p, u, v, ctx.budget_chains)
            got = h.classify()
            full = B.is_full(p.elements[u].payload, p.elements[v].payload)
            want = f"SPHERE({p.rank[v] - p.rank[u] - 2})" if full else "ACYCLIC"
            counts[got] = counts.get(got, 0) + 1
            if got != want or h.euler_characteristic() != mu[u, v]:
                return CheckResult("full-dichotomy", "FAIL", [
                    f"interval [{p.label(u)}, {p.label(v)}]: {'full' if full else 'not full'}, "
                    f"homology {got}, expected {want}, mu {mu[u, v]}",
                ], {"u": p.label(u), "v": p.label(v), "homology": h.lines()})
    summary = ", ".join(f"{k}: {counts[k]}" for k in sorted(counts))
    return CheckResult("full-dichotomy", "PASS",
                       ctx.truncation_note() + [f"{sum(counts.values())} intervals ({summary})"])


def check_lemma_cover(ctx: CheckContext) -> CheckResult:
    B = ctx.bruhat
    bad = B.lemma_cover_violations()
    n = sum(1 for e in B.enum.elements if e.ell_theta == 1)
    if not bad:
        return CheckResult("lemma-cover", "PASS", ctx.truncation_note() + [
            f"{n} twisted involutions with ell_theta = 1 each cover at most one twisted identity"])
    v, below = bad[0]
    lab = lambda i: B.element(i).sexpr_text() or "e"
    return CheckResult("lemma-cover", "FAIL", [f"{lab(v)} covers {', '.join(lab(x) for x in below)}"],
                       {"v": lab(v), "covers": [lab(x) for x in below]})


def check_factorization(ctx: CheckContext) -> CheckResult:
    r = factors_through(ctx.ts, ctx.budget_elements)
    return CheckResult("factorization", _status(r.factors), r.describe().splitlines(),
                       None if r.factors else {"residual": list(r.residual.coeffs)})


def check_prop51(ctx: CheckContext) -> CheckResult:
    ok = commuting_orbits_condition(ctx.ts)
    m = ctx.ts.system.matrix
    bad = [(s, ctx.ts.theta(s)) for s in ctx.ts.system.generators
           if s < ctx.ts.theta(s) and m[s, ctx.ts.theta(s)] not in (1, 2, INF)]
    details = [f"m(s{a + 1}, s{b + 1}) = {int(m[a, b])}" for a, b in bad] or ["m(s, theta(s)) in {1, 2, inf} for all s"]
    return CheckResult("prop51", _status(ok), details, {"pairs": [[a + 1, b + 1] for a, b in bad]} if bad else None)


def check_mobius_range(ctx: CheckContext) -> CheckResult:
    p = ctx.bruhat.poset("iota")
    mu = mobius_matrix(p)
    vals = sorted(set(int(x) for x in mu[p.leq]))
    ok = set(vals) <= {-1, 0, 1}
    details = ctx.truncation_note() + [f"{len(p)} elements, mu values {vals}"]
    witness = None
    if not ok:
        u, v = next((int(a), int(b)) for a, b in np.argwhere(p.leq & (np.abs(mu) > 1)))
        witness = {"u": p.label(u), "v": p.label(v), "mu": int(mu[u, v])}
        details.append(f"mu({p.label(u)}, {p.label(v)}) = {mu[u, v]}")
    return CheckResult("mobius-range", _status(ok), details, witness)


def predicted_maximal_count(ts: TwistedSystem) -> Optional[int]:
    """Number of maximal twisted identities for irreducible finite W, else None."""
    system = ts.system
    if not system.is_finite or len(components(system.matrix.entries)) != 1:
        return None
    if ts.theta.is_identity:
        return 1
    label = system.finite_type
    if label.startswith("A") and system.rank % 2 == 0:
        return system.rank // 2 + 1
    if label.startswith("I2(") and int(label[3:-1]) % 2 == 1:
        return 2
    return 1


def check_maximal(ctx: CheckContext) -> CheckResult:
    B = ctx.bruhat
    p = B.poset("iota")
    if B.truncation_rank is not None:
        rep = directedness_within(p)
        details = [f"truncated at rank {B.truncation_rank}: {rep.bounded} pairs bounded within the truncation, "
                   f"{rep.unknown} unknown"]
        try:
            partition = find_commuting_partition(ctx.ts)
        except NoPartition:
            partition = None
        if partition is not None and rep.missing:
            ks = [coxeter_power_upper_bound(ctx.ts, B.element(p.elements[a].payload),
                                            B.element(p.elements[b].payload), partition)[0]
                  for a, b in rep.missing]
            details.append(f"all {len(ks)} unknown pairs are bounded by c^(2k) with k <= {max(ks)} "
                           "(c the Coxeter element of the commuting partition)")
        details.append("directedness is inconclusive from a truncation")
        return CheckResult("maximal", "INCONCLUSIVE", details)
    maxima = maximal_elements(p)
    labels = [p.label(i) for i in maxima]
    want = predicted_maximal_count(ctx.ts)
    details = [f"{len(maxima)} maximal: {' '.join(labels)}"]
    if want is None:
        details.append("no prediction for reducible groups")
        return CheckResult("maximal", "PASS", details)
    details.append(f"predicted {want}")
    return CheckResult("maximal", _status(want == len(maxima)), details,
                       None if want == len(maxima) else {"maximal": labels, "predicted": want})


def check_subword_oracle(ctx: CheckContext) -> CheckResult:
    """Lifting order == subword search == induced Bruhat order, on all enumerated pairs."""
    B = ctx.bruhat
    ts = ctx.ts
    elems = B.enum.elements
    if max(e.rho for e in elems) > SUBWORD_MAX:
        raise SubwordBudget("subword oracle", SUBWORD_MAX)
    for v, ev in enumerate(elems):
        for u, eu in enumerate(elems):
            a = bool(B.leq[u, v])
            b = ts.subword_check_bruteforce(eu, ev.sexpr)
            c = bruhat_leq(eu.element, ev.element)
            if not a == b == c:
                lab = lambda e: e.sexpr_text() or "e"
                return CheckResult("subword-oracle", "FAIL",
                                   [f"{lab(eu)} vs {lab(ev)}: lifting {a}, subword {b}, Bruhat {c}"],
                                   {"u": lab(eu), "v": lab(ev), "lifting": a, "subword": b, "bruhat": c})
    details = ctx.truncation_note() + [f"{len(elems) ** 2} twisted pairs agree"]
    system = ts.system
    if system.is_finite and system.finite_type and len(elems) <= 200:
        layers = enumerate_elements(system, None, ctx.budget_elements)
        if len(layers) <= 200:
            W = layers.elements
            for x in W:
                for y in W:
                    if bruhat_leq(x, y) != subword_leq_bruteforce(x, y):
                        return CheckResult("subword-oracle", "FAIL", [f"Bruhat {x!r} vs {y!r} disagrees"])
            details.append(f"{len(W) ** 2} pairs of W agree with the subword definition")
    return CheckResult("subword-oracle", "PASS", details)


SUITES: dict[str, Callable[[CheckContext], CheckResult]] = {
    "graded": check_graded_suite,
    "nof": check_nof,
    "full-dichotomy": check_full_dichotomy,
    "lemma-cover": check_lemma_cover,
    "factorization": check_factorization,
    "prop51": check_prop51,
    "mobius-range": check_mobius_range,
    "maximal": check_maximal,
    "subword-oracle": check_subword_oracle,
}


def run_check(name: str, ctx: CheckContext) -> CheckResult:
    return SUITES[name](ctx)
