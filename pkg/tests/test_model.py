import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import medscm as M
from medscm.model import NoiseSpec, Scm, StructuralTable


def test_factories_validate_clean():
    assert M.validate(M.thm1_counterexample(0.3, 0.8)) == []
    assert M.validate(M.thm2_counterexample(0.2, 0.3, 0.5, 0.9)) == []
    assert M.validate(M.thm3_counterexample(0.1, (0.1, 0.2, 0.4, 0.3), 0.5)) == []
    assert M.validate(M.pe_counterexample(0.5)) == []
    assert M.validate(M.random_separable_scm(0)) == []
    assert M.validate(M.random_additive_scm(0, shape="confounded")) == []


def test_noise_pmf_must_sum_to_one():
    scm = M.thm1_counterexample(0.5, 0.5)
    bad_noise = tuple(
        NoiseSpec(n.name, {0: 0.6, 1: 0.6}) if n.name == "eps_L" else n
        for n in scm.noise
    )
    bad = Scm(scm.variables, bad_noise, scm.tables, scm.exposure_levels)
    violations = M.validate(bad)
    assert any("sums to" in v for v in violations)


def test_outcome_into_exposure_edge_rejected():
    scm = M.pe_counterexample(0.5)
    # re-route A through Y: the shape check must reject the graph
    a_table = StructuralTable(
        "A", ("Y",), "eps_A", {((y,), e): e for y in (0, 1) for e in (0, 1)}
    )
    tables = tuple(a_table if t.variable == "A" else t for t in scm.tables)
    bad = Scm(scm.variables, scm.noise, tables, scm.exposure_levels)
    violations = M.validate(bad)
    assert any("not a supported mediation shape" in v for v in violations)


def test_partial_table_rejected():
    scm = M.pe_counterexample(0.5)
    y = scm.table_for("Y")
    rows = dict(y.table)
    rows.pop(((0, 0), 0))
    tables = tuple(
        StructuralTable("Y", y.parents, y.noise, rows) if t.variable == "Y" else t
        for t in scm.tables
    )
    bad = Scm(scm.variables, scm.noise, tables, scm.exposure_levels)
    assert any("not total" in v for v in M.validate(bad))


def test_exposure_levels_checked():
    scm = M.pe_counterexample(0.5)
    bad = Scm(scm.variables, scm.noise, scm.tables, (1, 1))
    assert any("must differ" in v for v in M.validate(bad))
    bad = Scm(scm.variables, scm.noise, scm.tables, (0, 7))
    assert any("exposure support" in v for v in M.validate(bad))


@pytest.mark.parametrize(
    "factory,args",
    [
        (M.thm1_counterexample, (0.0, 0.5)),
        (M.thm1_counterexample, (0.5, 1.0)),
        (M.thm2_counterexample, (0.5, 0.5, 0.2, 0.5)),
        (M.thm3_counterexample, (0.0, (0.25, 0.25, 0.25, 0.25), 0.5)),
        (M.thm3_counterexample, (0.5, (0.5, 0.5, 0.5, 0.5), 0.5)),
        (M.pe_counterexample, (1.0,)),
    ],
)
def test_factories_reject_out_of_domain(factory, args):
    with pytest.raises(M.DomainError):
        factory(*args)


def test_thm1_proof_case_split():
    # eps_L = 0 units: the exposure never moves the mediator;
    # eps_L = 1 units: the mediator never moves the outcome in either arm.
    scm = M.thm1_counterexample(0.37, 0.81)
    a_star, a = scm.exposure_levels
    for unit in M.enumerate_units(scm):
        m_treated = M.evaluate(scm, unit, {"A": a}).assignment["M"]
        m_control = M.evaluate(scm, unit, {"A": a_star}).assignment["M"]
        if unit.noise_assignment["eps_L"] == 0:
            assert m_treated == m_control
        else:
            for ap in (a_star, a):
                y0 = M.evaluate(scm, unit, {"A": ap, "M": 0}).assignment["Y"]
                y1 = M.evaluate(scm, unit, {"A": ap, "M": 1}).assignment["Y"]
                assert y0 == y1


def test_thm3_cross_world_dependence():
    spec = M.thm3_counterexample(0.3, (0.1, 0.2, 0.4, 0.3), 0.6)
    # one-world independences hold (validate is empty), yet the cross-world
    # independence of Y(a, m) and M(a*) fails
    assert M.validate(spec) == []
    verdict = M.check_assumption(spec, "A4")
    assert not verdict.holds
    assert verdict.worst_violation > 1e-9


def test_thm2_reduces_to_thm1_at_pi2_zero():
    t2 = M.thm2_counterexample(0.4, 0.6, 0.0, 0.7)
    t1 = M.thm1_counterexample(0.6, 0.7)
    assert abs(M.effect_report(t2).nie_r - M.effect_report(t1).nie_r) < 1e-12


def test_separable_requires_identity_components():
    scm = M.random_separable_scm(5)
    n = scm.table_for("N")
    flipped = {key: 1 - v for key, v in n.table.items()}
    tables = tuple(
        StructuralTable("N", n.parents, n.noise, flipped) if t.variable == "N" else t
        for t in scm.tables
    )
    bad = Scm(scm.variables, scm.noise, tables, scm.exposure_levels)
    assert any("deterministic copy" in v for v in M.validate(bad))


def test_additive_threshold_out_of_range_rejected():
    with pytest.raises(M.DomainError):
        M.additive_outcome_scm(
            f={(0,): 5, (1,): 5},
            g={(0,): 5, (1,): 5},
            denom=8,
            m_table={((a,), e): e for a in (0, 1) for e in (0, 1)},
            m_noise_pmf={0: 0.5, 1: 0.5},
        )


def test_json_round_trip_factories():
    for scm in (
        M.thm1_counterexample(0.25, 0.75),
        M.thm2_counterexample(0.2, 0.3, 0.5, 0.9),
        M.pe_counterexample(0.4),
        M.random_separable_scm(3),
        M.random_additive_scm(4, shape="confounded"),
    ):
        text = M.scm_to_json(scm)
        again = M.scm_from_json(text)
        assert M.scm_to_json(again) == text
        assert M.validate(again) == []


@settings(deadline=None, max_examples=25)
@given(seed=st.integers(0, 10**6), shape=st.sampled_from(["basic", "confounded"]),
       with_c=st.booleans())
def test_random_scm_valid_and_round_trips(seed, shape, with_c):
    scm = M.random_scm(seed, shape, with_c=with_c)
    assert M.validate(scm) == []
    assert M.scm_to_json(M.scm_from_json(M.scm_to_json(scm))) == M.scm_to_json(scm)


def test_edges_cross_checked_on_parse():
    scm = M.thm1_counterexample(0.5, 0.5)
    doc = M.model.scm_to_dict(scm)
    doc["edges"]["Y"] = ["A"]
    with pytest.raises(ValueError, match="edges disagree"):
        M.model.scm_from_dict(doc)


def test_ffrcistg_one_world_violation_detected():
    spec = M.thm3_counterexample(0.4, (0.1, 0.2, 0.4, 0.3), 0.5)
    # tie the factual exposure to M(a): breaks A independence in-world
    idx = spec.label_index()
    joint = {}
    for atom, w in spec.joint.items():
        forced = list(atom)
        forced[idx["A"]] = atom[idx[f"M({spec.a})"]]
        joint[tuple(forced)] = joint.get(tuple(forced), 0.0) + w
    bad = dataclasses.replace(spec, joint=joint)
    assert any("one-world independence fails" in v for v in M.validate(bad))
