"""Nonparametric identification functionals and exchangeability checks.

The functionals consume an ObservedLaw only, never a model, which enforces
the identification boundary at the type level: anything counterfactual must
arrive through the engine's enumeration instead. Assumption checks go the
other way; they interrogate the full counterfactual joint of a model by
exact factorization tests.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import engine
from .engine import ObservedLaw
from .errors import DegenerateStratumError, DomainError, ShapeError
from .model import FfrcistgSpec, Model

INDEPENDENCE_TOL = 1e-9

ASSUMPTIONS = ("A1", "A2", "A3", "A4", "A6", "A7")


@dataclass(frozen=True)
class AssumptionVerdict:
    """Outcome of one exchangeability/positivity check.

    worst_violation is the maximum absolute deviation of a joint cell from
    the product of its marginals; for the positivity check it is the negated
    smallest required cell probability (1.0 when a required cell is empty),
    so 'holds' is worst_violation <= 1e-9 in both cases.
    """

    assumption: str
    holds: bool
    worst_violation: float
    witness: str


# ---------------------------------------------------------------------------
# Identification functionals
# ---------------------------------------------------------------------------


def _check_arm_positivity(law: ObservedLaw) -> None:
    for c, w_c in law.c_strata():
        if w_c <= 0.0:
            continue
        for ap in law.exposure_levels:
            if law.prob(c=c, a=ap) <= 0.0:
                raise DegenerateStratumError(f"Pr(A={ap} | c={c!r}) = 0")


def _check_mediator_positivity(law: ObservedLaw) -> None:
    # In-sample analog of the mediator-density positivity requirement: every
    # mediator level must occur in both exposure arms within every covariate
    # stratum.
    _check_arm_positivity(law)
    for c, w_c in law.c_strata():
        if w_c <= 0.0:
            continue
        for ap in law.exposure_levels:
            for m in law.m_support:
                if law.prob(c=c, a=ap, m=m) <= 0.0:
                    raise DegenerateStratumError(
                        f"Pr(M={m} | A={ap}, c={c!r}) = 0"
                    )


def psi_te(law: ObservedLaw) -> float:
    """E{E(Y|a,C)} - E{E(Y|a*,C)} as exact stratum sums."""
    _check_arm_positivity(law)
    a_star, a = law.exposure_levels
    value = 0.0
    for c, w_c in law.c_strata():
        value += w_c * (law.mean_y(c=c, a=a) - law.mean_y(c=c, a=a_star))
    return value


def psi_cde(law: ObservedLaw, m: int) -> float:
    """Controlled-direct-effect functional; adjusts for the observed
    confounder by the per-arm g-formula when the law has one."""
    if m not in law.m_support:
        raise DomainError(f"mediator level {m} outside support")
    _check_arm_positivity(law)
    a_star, a = law.exposure_levels
    value = 0.0
    for c, w_c in law.c_strata():
        if not law.has_l:
            value += w_c * (law.mean_y(c=c, a=a, m=m) - law.mean_y(c=c, a=a_star, m=m))
            continue
        per_arm = []
        for ap in (a, a_star):
            acc = 0.0
            for l in law.l_support:
                w_l = law.cond_prob(of={"l": l}, given={"c": c, "a": ap})
                if w_l <= 0.0:
                    continue
                acc += w_l * law.mean_y(c=c, a=ap, l=l, m=m)
            per_arm.append(acc)
        value += w_c * (per_arm[0] - per_arm[1])
    return value


def psi_pe(law: ObservedLaw, m: int) -> float:
    """Portion-eliminated functional: psi_te - psi_cde at level m."""
    return psi_te(law) - psi_cde(law, m)


def psi_nie(law: ObservedLaw) -> float:
    """The mediation-formula functional
    E{E(Y|a,C)} - E[E{E(Y|M,a,C) | a*,C}]."""
    _check_mediator_positivity(law)
    a_star, a = law.exposure_levels
    value = 0.0
    for c, w_c in law.c_strata():
        inner = 0.0
        for m in law.m_support:
            w_m = law.cond_prob(of={"m": m}, given={"c": c, "a": a_star})
            if w_m <= 0.0:
                continue
            inner += w_m * law.mean_y(c=c, a=a, m=m)
        value += w_c * (law.mean_y(c=c, a=a) - inner)
    return value


def psi_nie_r_L(law: ObservedLaw) -> float:
    """Identification functional for the covariate-stratified randomized
    indirect contrast in the presence of an observed induced confounder:
    E[ sum_m sum_l E(Y|m,l,a,C) Pr(l|a,C) {Pr(m|a,C) - Pr(m|a*,C)} ]."""
    if not law.has_l:
        raise ShapeError("functional requires a law with an induced confounder")
    _check_mediator_positivity(law)
    a_star, a = law.exposure_levels
    value = 0.0
    for c, w_c in law.c_strata():
        acc = 0.0
        for m in law.m_support:
            delta = law.cond_prob(of={"m": m}, given={"c": c, "a": a}) - law.cond_prob(
                of={"m": m}, given={"c": c, "a": a_star}
            )
            if delta == 0.0:
                continue
            inner = 0.0
            for l in law.l_support:
                w_l = law.cond_prob(of={"l": l}, given={"c": c, "a": a})
                if w_l <= 0.0:
                    continue
                inner += w_l * law.mean_y(c=c, a=a, l=l, m=m)
            acc += delta * inner
        value += w_c * acc
    return value


def psi_nie_rl(law: ObservedLaw) -> float:
    """Identification functional for the contrast whose draw is stratified on
    the observed confounder:
    E{E(Y|L,a,C)} - E[E{E(Y|M,L,a,C) | L,a*,C}], the outer expectation taken
    over the marginal (C, L) law."""
    if not law.has_l:
        raise ShapeError("functional requires a law with an induced confounder")
    a_star, a = law.exposure_levels
    value = 0.0
    for c, w_c in law.c_strata():
        if w_c <= 0.0:
            continue
        for l in law.l_support:
            w_cl = law.prob(c=c, l=l)
            if w_cl <= 0.0:
                continue
            first = law.mean_y(c=c, a=a, l=l)
            second = 0.0
            for m in law.m_support:
                w_m = law.cond_prob(of={"m": m}, given={"c": c, "a": a_star, "l": l})
                if w_m <= 0.0:
                    continue
                second += w_m * law.mean_y(c=c, a=a, l=l, m=m)
            value += w_cl * (first - second)
    return value


FUNCTIONALS = {
    "psi_te": psi_te,
    "psi_cde": psi_cde,
    "psi_pe": psi_pe,
    "psi_nie": psi_nie,
    "psi_nie_r_L": psi_nie_r_L,
    "psi_nie_rl": psi_nie_rl,
}


# ---------------------------------------------------------------------------
# Assumption checks on the counterfactual joint
# ---------------------------------------------------------------------------


def _max_dependence(pairs: list[tuple[int, int, float]]) -> tuple[float, str]:
    """Max |P(x,z) - P(x)P(z)| over cells of a weighted discrete pair."""
    total = sum(w for _x, _z, w in pairs)
    if total <= 0.0:
        return 0.0, ""
    joint: dict[tuple[int, int], float] = {}
    px: dict[int, float] = {}
    pz: dict[int, float] = {}
    for x, z, w in pairs:
        joint[(x, z)] = joint.get((x, z), 0.0) + w / total
        px[x] = px.get(x, 0.0) + w / total
        pz[z] = pz.get(z, 0.0) + w / total
    worst = 0.0
    witness = ""
    for x in px:
        for z in pz:
            dev = abs(joint.get((x, z), 0.0) - px[x] * pz[z])
            if dev > worst:
                worst = dev
                witness = f"cell (x={x}, z={z})"
    return worst, witness


def _conditional_independence(
    profs, x_fn, z_fn, stratum_fn, member_fn=lambda p: True
) -> tuple[float, str]:
    strata: dict = {}
    for p in profs:
        if member_fn(p):
            strata.setdefault(stratum_fn(p), []).append(p)
    worst = 0.0
    witness = ""
    for key, members in strata.items():
        dev, cell = _max_dependence([(x_fn(p), z_fn(p), p.weight) for p in members])
        if dev > worst:
            worst = dev
            witness = f"stratum {key!r}, {cell}"
    return worst, witness


def check_assumption(model: Model, which: str) -> AssumptionVerdict:
    """Exact factorization (or positivity) test of one assumption over the
    model's full counterfactual joint."""
    if which not in ASSUMPTIONS:
        raise DomainError(f"unknown assumption {which!r}; expected one of {ASSUMPTIONS}")
    profs = engine.profiles(model)
    arms = model.exposure_levels
    msup = engine.m_support(model)
    has_l = not isinstance(model, FfrcistgSpec) and model.has_l

    if which == "A6":
        return _check_positivity(model)

    worst = 0.0
    witness = ""

    def fold(dev: float, cell: str, tag: str) -> None:
        nonlocal worst, witness
        if dev > worst:
            worst = dev
            witness = f"{tag}: {cell}"

    if which == "A1":
        # Y(a', m) independent of the factual exposure given C
        for ap in arms:
            for m in msup:
                dev, cell = _conditional_independence(
                    profs, lambda p: p.y_cf[(ap, m)], lambda p: p.a, lambda p: p.c
                )
                fold(dev, cell, f"Y({ap},{m}) vs A")
    elif which == "A2":
        # Y(a', m) independent of the factual mediator given C within arm a'
        for ap in arms:
            for m in msup:
                dev, cell = _conditional_independence(
                    profs,
                    lambda p: p.y_cf[(ap, m)],
                    lambda p: p.m,
                    lambda p: p.c,
                    member_fn=lambda p: p.a == ap,
                )
                fold(dev, cell, f"Y({ap},{m}) vs M | A={ap}")
    elif which == "A3":
        for ap in arms:
            dev, cell = _conditional_independence(
                profs, lambda p: p.m_cf[ap], lambda p: p.a, lambda p: p.c
            )
            fold(dev, cell, f"M({ap}) vs A")
    elif which == "A4":
        # the cross-world independence: Y(a, m) vs M(a*) given C
        a_star, a = arms
        for m in msup:
            dev, cell = _conditional_independence(
                profs, lambda p: p.y_cf[(a, m)], lambda p: p.m_cf[a_star], lambda p: p.c
            )
            fold(dev, cell, f"Y({a},{m}) vs M({a_star})")
    elif which == "A7":
        # Y(a', m) vs the factual mediator given (C, L) within arm a'; with no
        # induced confounder this coincides with A2
        for ap in arms:
            for m in msup:
                dev, cell = _conditional_independence(
                    profs,
                    lambda p: p.y_cf[(ap, m)],
                    lambda p: p.m,
                    (lambda p: (p.c, p.l)) if has_l else (lambda p: p.c),
                    member_fn=lambda p: p.a == ap,
                )
                fold(dev, cell, f"Y({ap},{m}) vs M | L, A={ap}")

    return AssumptionVerdict(which, worst <= INDEPENDENCE_TOL, worst, witness)


def _check_positivity(model: Model) -> AssumptionVerdict:
    profs = engine.profiles(model)
    arms = model.exposure_levels
    law = engine.observational_law(model)
    required: list[tuple[str, float]] = []
    for c, w_c in law.c_strata():
        if w_c <= 0.0:
            continue
        for ap in arms:
            required.append((f"Pr(A={ap} | c={c!r})", law.prob(c=c, a=ap) / w_c))
    # mediator levels that must be observable in each arm: the factual support
    # united with the counterfactual support of M(a') for that arm
    observed_m = {p.m for p in profs}
    for ap in arms:
        needed = observed_m | {p.m_cf[ap] for p in profs}
        for c, w_c in law.c_strata():
            if w_c <= 0.0:
                continue
            w_arm = law.prob(c=c, a=ap)
            for m in sorted(needed):
                cell = law.prob(c=c, a=ap, m=m) / w_arm if w_arm > 0.0 else 0.0
                required.append((f"f(M={m} | A={ap}, c={c!r})", cell))
    min_cell, min_name = min(((p, name) for name, p in required), default=(1.0, ""))
    if min_cell <= 0.0:
        return AssumptionVerdict("A6", False, 1.0, f"empty required cell {min_name}")
    return AssumptionVerdict("A6", True, -min_cell, f"smallest required cell {min_name}")


def check_all_assumptions(model: Model) -> list[AssumptionVerdict]:
    return [check_assumption(model, which) for which in ASSUMPTIONS]
