"""Exhaustive enumeration of exogenous noise and exact counterfactual means.

Every quantity downstream (effect measures, identification functionals,
criterion checks) is a finite weighted sum over the units produced here, so
this module is the single source of ground truth. All sums run in the
canonical unit order fixed by enumeration, which makes results bitwise
deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

from .errors import DegenerateStratumError, DomainError, EnumerationSizeError, ShapeError
from .model import FfrcistgSpec, Model

DEFAULT_UNIT_CAP = 10**8

COND_C = "C"
COND_C_L_OBSERVED = "C,L"
COND_C_L_DRAW = "C,L(a_draw)"


@dataclass(frozen=True)
class Unit:
    """One joint exogenous-noise configuration (or counterfactual atom) with
    its probability mass; zero-mass configurations are never retained."""

    noise_assignment: Mapping[str, int]
    weight: float


@dataclass(frozen=True)
class Intervention:
    """A partial do-assignment of variables to levels."""

    fixed: Mapping[str, int]


@dataclass(frozen=True)
class World:
    """A total variable assignment produced under an intervention regime."""

    assignment: Mapping[str, int]
    regime: Intervention


def _fixed(iv: Intervention | Mapping[str, int] | None) -> Mapping[str, int]:
    if iv is None:
        return {}
    if isinstance(iv, Intervention):
        return iv.fixed
    return iv


# ---------------------------------------------------------------------------
# Enumeration and evaluation
# ---------------------------------------------------------------------------


def enumerate_units(model: Model, cap: int = DEFAULT_UNIT_CAP) -> list[Unit]:
    """Cartesian product of noise supports with product weights (or the atoms
    of an explicit counterfactual joint); total weight is 1."""
    if isinstance(model, FfrcistgSpec):
        labels = model.labels
        return [
            Unit(dict(zip(labels, atom)), w)
            for atom, w in model.joint.items()
            if w > 0.0
        ]
    size = 1
    for n in model.noise:
        size *= len(n.pmf)
        if size > cap:
            raise EnumerationSizeError(
                f"noise product space exceeds cap ({size} > {cap})"
            )
    order = model.topo_order
    specs = [model.noise_for(name) for name in order]
    names = [s.name for s in specs]
    level_lists = [s.levels() for s in specs]
    units = []
    for combo in itertools.product(*level_lists):
        w = 1.0
        for spec, level in zip(specs, combo):
            w *= spec.pmf[level]
        if w > 0.0:
            units.append(Unit(dict(zip(names, combo)), w))
    return units


def evaluate(model: Model, unit: Unit, iv: Intervention | Mapping[str, int] | None = None) -> World:
    """Topological evaluation of the structural tables under an intervention;
    intervened variables bypass their tables. Deterministic given (unit, iv)."""
    fixed = _fixed(iv)
    if isinstance(model, FfrcistgSpec):
        return _evaluate_ffrcistg(model, unit, fixed)
    assignment: dict[str, int] = {}
    for name in model.topo_order:
        if name in fixed:
            assignment[name] = fixed[name]
            continue
        t = model.table_for(name)
        pv = tuple(assignment[p] for p in t.parents)
        assignment[name] = t.value(pv, unit.noise_assignment[t.noise])
    return World(assignment, Intervention(dict(fixed)))


def _evaluate_ffrcistg(spec: FfrcistgSpec, unit: Unit, fixed: Mapping[str, int]) -> World:
    atom = unit.noise_assignment
    a_val = fixed.get("A", atom["A"])
    if a_val not in spec.exposure_levels:
        raise DomainError(f"exposure level {a_val} not represented in the counterfactual joint")
    m_val = fixed.get("M", atom[f"M({a_val})"])
    y_val = atom[f"Y({a_val},{m_val})"]
    return World({"A": a_val, "M": m_val, "Y": y_val}, Intervention(dict(fixed)))


def nested_outcome(model: Model, unit: Unit, a_outer: int, a_inner: int) -> int:
    """Y under exposure a_outer with the mediator held at the value it takes
    under exposure a_inner; equals Y(a_outer) when the two arms coincide."""
    m_name = "M" if isinstance(model, FfrcistgSpec) else model.mediator_name
    y_name = "Y" if isinstance(model, FfrcistgSpec) else model.outcome_name
    a_name = "A" if isinstance(model, FfrcistgSpec) else model.exposure_name
    m_dagger = evaluate(model, unit, {a_name: a_inner}).assignment[m_name]
    return evaluate(model, unit, {a_name: a_outer, m_name: m_dagger}).assignment[y_name]


# ---------------------------------------------------------------------------
# Per-unit counterfactual profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnitProfile:
    """All counterfactual coordinates of one unit needed downstream."""

    weight: float
    c: tuple[int, ...]
    a: int
    l: int | None
    m: int
    y: int
    l_cf: Mapping[int, int] | None          # arm -> L(a')
    m_cf: Mapping[int, int]                 # arm -> M(a')
    y_cf: Mapping[tuple[int, int], int]     # (arm, m) -> Y(a', m)
    y_mfix: Mapping[int, int]               # m -> Y under do(M=m) only

    def nested(self, a_outer: int, a_inner: int) -> int:
        return self.y_cf[(a_outer, self.m_cf[a_inner])]


def _names(model: Model) -> tuple[tuple[str, ...], str, str | None, str, str]:
    if isinstance(model, FfrcistgSpec):
        return (), "A", None, "M", "Y"
    return (
        model.covariate_names,
        model.exposure_name,
        model.induced_name,
        model.mediator_name,
        model.outcome_name,
    )


def m_support(model: Model) -> tuple[int, ...]:
    return model.m_support


@lru_cache(maxsize=32)
def profiles(model: Model) -> tuple[UnitProfile, ...]:
    """Enumerate units and compute every counterfactual coordinate once."""
    c_names, a_name, l_name, m_name, y_name = _names(model)
    arms = model.exposure_levels
    msup = m_support(model)
    out = []
    for unit in enumerate_units(model):
        factual = evaluate(model, unit).assignment
        l_cf: dict[int, int] | None = {} if l_name else None
        m_cf: dict[int, int] = {}
        y_cf: dict[tuple[int, int], int] = {}
        for ap in arms:
            world = evaluate(model, unit, {a_name: ap}).assignment
            m_cf[ap] = world[m_name]
            if l_name:
                l_cf[ap] = world[l_name]
            for m in msup:
                y_cf[(ap, m)] = evaluate(model, unit, {a_name: ap, m_name: m}).assignment[y_name]
        y_mfix = {
            m: evaluate(model, unit, {m_name: m}).assignment[y_name] for m in msup
        }
        out.append(
            UnitProfile(
                weight=unit.weight,
                c=tuple(factual[c] for c in c_names),
                a=factual[a_name],
                l=factual[l_name] if l_name else None,
                m=factual[m_name],
                y=factual[y_name],
                l_cf=l_cf,
                m_cf=m_cf,
                y_cf=y_cf,
                y_mfix=y_mfix,
            )
        )
    return tuple(out)


# ---------------------------------------------------------------------------
# Observational law
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ObservedLaw:
    """Exact or empirical joint pmf over the factual variables.

    Keys are (c_tuple, a, l, m, y) with c_tuple empty when there are no
    covariates and l None when the graph has no induced confounder. This is
    the only object identification functionals are allowed to consume.
    """

    pmf: Mapping[tuple, float]
    c_names: tuple[str, ...]
    c_supports: tuple[tuple[int, ...], ...]
    a_support: tuple[int, ...]
    l_support: tuple[int, ...] | None
    m_support: tuple[int, ...]
    y_support: tuple[int, ...]
    exposure_levels: tuple[int, int]

    @property
    def has_l(self) -> bool:
        return self.l_support is not None

    @property
    def a_star(self) -> int:
        return self.exposure_levels[0]

    @property
    def a(self) -> int:
        return self.exposure_levels[1]

    def total(self) -> float:
        return sum(self.pmf.values())

    def cells(self) -> Iterable[tuple[tuple, float]]:
        return self.pmf.items()

    def c_strata(self) -> list[tuple[tuple[int, ...], float]]:
        acc: dict[tuple[int, ...], float] = {}
        for (c, _a, _l, _m, _y), w in self.pmf.items():
            acc[c] = acc.get(c, 0.0) + w
        return list(acc.items())

    def _match(self, key: tuple, c, a, l, m) -> bool:
        kc, ka, kl, km, _ky = key
        if c is not None and kc != c:
            return False
        if a is not None and ka != a:
            return False
        if l is not None and kl != l:
            return False
        if m is not None and km != m:
            return False
        return True

    def prob(self, *, c=None, a=None, l=None, m=None) -> float:
        return sum(w for key, w in self.pmf.items() if self._match(key, c, a, l, m))

    def cond_prob(self, *, of: dict, given: dict) -> float:
        denom = self.prob(**given)
        if denom <= 0.0:
            raise DegenerateStratumError(repr(given))
        return self.prob(**{**given, **of}) / denom

    def mean_y(self, *, c=None, a=None, l=None, m=None) -> float:
        denom = 0.0
        num = 0.0
        for key, w in self.pmf.items():
            if self._match(key, c, a, l, m):
                denom += w
                num += w * key[4]
        if denom <= 0.0:
            raise DegenerateStratumError(
                f"E(Y | c={c!r}, a={a!r}, l={l!r}, m={m!r})"
            )
        return num / denom


def observational_law(model: Model) -> ObservedLaw:
    """Pushforward of unit weights through factual evaluation; exact pmf."""
    profs = profiles(model)
    pmf: dict[tuple, float] = {}
    for p in profs:
        key = (p.c, p.a, p.l, p.m, p.y)
        pmf[key] = pmf.get(key, 0.0) + p.weight
    if isinstance(model, FfrcistgSpec):
        return ObservedLaw(
            pmf=pmf,
            c_names=(),
            c_supports=(),
            a_support=model.exposure_levels,
            l_support=None,
            m_support=model.m_support,
            y_support=model.y_support,
            exposure_levels=model.exposure_levels,
        )
    c_names = model.covariate_names
    return ObservedLaw(
        pmf=pmf,
        c_names=c_names,
        c_supports=tuple(model.var(c).support for c in c_names),
        a_support=model.var(model.exposure_name).support,
        l_support=model.var(model.induced_name).support if model.has_l else None,
        m_support=model.m_support,
        y_support=model.var(model.outcome_name).support,
        exposure_levels=model.exposure_levels,
    )


# ---------------------------------------------------------------------------
# Randomized-draw means
# ---------------------------------------------------------------------------


def _group(profs, key_fn) -> dict:
    strata: dict = {}
    for p in profs:
        strata.setdefault(key_fn(p), []).append(p)
    return strata


def g_draw_mean(model: Model, a_set: int, a_draw: int, conditioning: str = COND_C) -> float:
    """Mean outcome under exposure a_set with the mediator set to a random
    draw from the law of the counterfactual mediator under a_draw, the draw
    being independent of the unit within each conditioning stratum.

    conditioning selects the stratification of the draw: the covariates
    alone, the covariates plus the observed confounder (in which case the
    draw law and the outcome mean each condition on their own exposure arm,
    matching the corresponding identification functional), or the covariates
    plus the counterfactual confounder under the draw arm.
    """
    profs = profiles(model)
    msup = m_support(model)
    if conditioning == COND_C:
        strata = _group(profs, lambda p: p.c)
        value = 0.0
        for _key, members in strata.items():
            w_s = sum(p.weight for p in members)
            draw = {m: 0.0 for m in msup}
            out = {m: 0.0 for m in msup}
            for p in members:
                draw[p.m_cf[a_draw]] += p.weight
                for m in msup:
                    out[m] += p.weight * p.y_cf[(a_set, m)]
            value += sum(draw[m] * out[m] for m in msup) / w_s
        return value
    if not _has_l(model):
        raise ShapeError(f"conditioning {conditioning!r} requires an induced confounder")
    if conditioning == COND_C_L_DRAW:
        strata = _group(profs, lambda p: (p.c, p.l_cf[a_draw]))
        value = 0.0
        for _key, members in strata.items():
            w_s = sum(p.weight for p in members)
            draw = {m: 0.0 for m in msup}
            out = {m: 0.0 for m in msup}
            for p in members:
                draw[p.m_cf[a_draw]] += p.weight
                for m in msup:
                    out[m] += p.weight * p.y_cf[(a_set, m)]
            value += sum(draw[m] * out[m] for m in msup) / w_s
        return value
    if conditioning == COND_C_L_OBSERVED:
        strata = _group(profs, lambda p: (p.c, p.l))
        value = 0.0
        for key, members in strata.items():
            w_s = sum(p.weight for p in members)
            draw_members = [p for p in members if p.a == a_draw]
            out_members = [p for p in members if p.a == a_set]
            w_d = sum(p.weight for p in draw_members)
            w_o = sum(p.weight for p in out_members)
            if w_d <= 0.0:
                raise DegenerateStratumError(f"draw arm A={a_draw} within (c, l)={key!r}")
            if w_o <= 0.0:
                raise DegenerateStratumError(f"outcome arm A={a_set} within (c, l)={key!r}")
            draw = {m: 0.0 for m in msup}
            for p in draw_members:
                draw[p.m_cf[a_draw]] += p.weight / w_d
            out = {m: 0.0 for m in msup}
            for p in out_members:
                for m in msup:
                    out[m] += p.weight * p.y_cf[(a_set, m)] / w_o
            value += w_s * sum(draw[m] * out[m] for m in msup)
        return value
    raise DomainError(f"unknown conditioning {conditioning!r}")


def h_draw_mean(model: Model, a_stratum: int, a_draw: int) -> float:
    """Mean outcome in the factual exposure stratum a_stratum when the
    mediator is set to a draw from its observed conditional law in arm
    a_draw, within covariate strata. Only the mediator is intervened on."""
    profs = profiles(model)
    msup = m_support(model)
    strata = _group(profs, lambda p: p.c)
    value = 0.0
    for key, members in strata.items():
        w_s = sum(p.weight for p in members)
        draw_members = [p for p in members if p.a == a_draw]
        out_members = [p for p in members if p.a == a_stratum]
        w_d = sum(p.weight for p in draw_members)
        w_o = sum(p.weight for p in out_members)
        if w_d <= 0.0:
            raise DegenerateStratumError(f"draw arm A={a_draw} within c={key!r}")
        if w_o <= 0.0:
            raise DegenerateStratumError(f"stratum arm A={a_stratum} within c={key!r}")
        draw = {m: 0.0 for m in msup}
        for p in draw_members:
            draw[p.m] += p.weight / w_d
        out = {m: 0.0 for m in msup}
        for p in out_members:
            for m in msup:
                out[m] += p.weight * p.y_mfix[m] / w_o
        value += w_s * sum(draw[m] * out[m] for m in msup)
    return value


def _has_l(model: Model) -> bool:
    if isinstance(model, FfrcistgSpec):
        return False
    return model.has_l
