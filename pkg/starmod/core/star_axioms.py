"""Seeded checker for the star-product axioms."""

import logging

from starmod.core.algebras import one
from starmod.core.reports import CheckReport
from starmod.core.sampling import Sampler, SeedLike
from starmod.core.scalars import I
from starmod.core.series import first_difference
from starmod.core.star import StarProduct, TwistedStar, verify_intertwining

log = logging.getLogger(__name__)

AXIOMS = ("c0-product", "c1-antisymmetry", "unit", "hermitian", "associativity")


def check_star_axioms(star: StarProduct, sample_count: int, seed: SeedLike) -> CheckReport:
    """Check C₀, C₁ antisymmetry, unit, Hermiticity and associativity on random triples.

    Failures are report content: each axiom keeps the lowest failing λ-order and a
    witness triple.
    """
    if sample_count < 1:
        raise ValueError(f"sample_count must be at least 1, got {sample_count}")
    sampler = Sampler(seed)
    report = CheckReport(f"{star.name} product on the {star.descriptor.kind}",
                         conventions={"ordering": star.convention})
    c0, c1, unit, hermitian, assoc = (report.add(name) for name in AXIOMS)
    descriptor = star.descriptor
    unit_series = star.lift(one(descriptor))
    if not star.hermitian:
        report.conventions["hermitian"] = "not claimed"

    log.info(f"Checking star axioms for {star!r} on {sample_count} samples (seed={seed})")
    for _ in range(sample_count):
        f, g, h = (sampler.element(descriptor) for _ in range(3))
        F, G, H = star.lift(f), star.lift(g), star.lift(h)
        witness = (f, g, h)

        fg = star.multiply(F, G)
        gf = star.multiply(G, F)

        c0.record(None if fg[0] == f * g else 0, witness)

        if star.order >= 1:
            antisym = fg[1] - gf[1]
            c1.record(None if antisym == star.bracket(f, g).scale(I) else 1, witness)
        else:
            c1.record(None, witness)

        left_unit = first_difference(star.multiply(unit_series, F), F)
        right_unit = first_difference(star.multiply(F, unit_series), F)
        orders = [o for o in (left_unit, right_unit) if o is not None]
        unit.record(min(orders) if orders else None, witness)

        if star.hermitian:
            hermitian.record(
                first_difference(fg.conjugate(), star.multiply(G.conjugate(), F.conjugate())), witness
            )
        else:
            hermitian.record(None, witness)

        assoc.record(
            first_difference(star.multiply(fg, H), star.multiply(F, star.multiply(G, H))), witness
        )

    for check in report.checks:
        if not check.passed:
            log.info(f"Axiom {check.name} fails at order {check.first_failing_order}")
    return report


def check_intertwining(twisted: TwistedStar, sample_count: int, seed: SeedLike) -> CheckReport:
    """T(f⋆g) = Tf ⋆′ Tg on random pairs of series."""
    sampler = Sampler(seed)
    report = CheckReport(f"twist of the {twisted.base.name} product", conventions={"ordering": twisted.convention})
    check = report.add("intertwining")
    for _ in range(sample_count):
        f = sampler.series(twisted.descriptor, twisted.order, max_terms=1)
        g = sampler.series(twisted.descriptor, twisted.order, max_terms=1)
        check.record(verify_intertwining(twisted, f, g), (f, g))
    return report
