import pytest

from bundlediag.model import ModelError, SupportModel, support_of
from bundlediag.presets import preset
from bundlediag.scenario import GlobalAssignment, Scenario, Section
from bundlediag.solver import (
    LOGICAL,
    NONCONTEXTUAL,
    STRONG,
    CertificateError,
    Classification,
    NotParityModel,
    OracleTooLarge,
    ParityContradiction,
    ParityRow,
    ParitySolution,
    ParitySystem,
    build_parity_system,
    classify,
    enumerate_global_sections,
    extend_section,
    is_global_section,
    oracle_classification,
    parity_obstruction,
    parse_seed,
    verify_classification,
)
from helpers import brute_force_globals


@pytest.fixture(scope="module")
def models():
    return {name: support_of(preset(name)[1]) for name in ("bell", "pr-box", "ghz-ab", "cluster-ring-5")}


def bell_g(**values):
    return GlobalAssignment(tuple(values.items()))


def test_is_global_section_examples(models):
    bell = models["bell"]
    assert is_global_section(bell, bell_g(X_A=1, X_B=1, Z_A=0, Z_B=0))
    assert not is_global_section(bell, bell_g(X_A=1, X_B=0, Z_A=0, Z_B=0))
    with pytest.raises(ModelError):
        is_global_section(bell, Section.of({"X_A": 1}))
    s = Scenario.build(["a", "b"], {"C": ["a", "b"]})
    full = SupportModel.from_supports(s, {"C": ["00", "01", "10", "11"]})
    assert all(is_global_section(full, g) for g in enumerate_global_sections(full))


def test_oracle_examples(models):
    assert enumerate_global_sections(models["pr-box"]) == []
    bell = enumerate_global_sections(models["bell"])
    assert [g.values_for(("X_A", "X_B", "Z_A", "Z_B")) for g in bell] == [
        (0, 0, 0, 0),
        (0, 0, 1, 1),
        (1, 1, 0, 0),
        (1, 1, 1, 1),
    ]
    assert len(enumerate_global_sections(models["cluster-ring-5"])) == 32


def test_oracle_matches_itertools_on_presets(models):
    for sm in models.values():
        fast = [g.as_dict() for g in enumerate_global_sections(sm)]
        assert sorted(map(sorted, map(dict.items, fast))) == sorted(
            map(sorted, map(dict.items, brute_force_globals(sm)))
        )


def test_oracle_cap():
    names = [f"o{i}" for i in range(25)]
    s = Scenario.build(names, {f"C{i}": [n] for i, n in enumerate(names)})
    sm = SupportModel.from_supports(s, {f"C{i}": ["0", "1"] for i in range(25)})
    with pytest.raises(OracleTooLarge):
        enumerate_global_sections(sm)


def test_mixed_arity_oracle():
    s = Scenario.build(["a", "b"], {"C1": ["a", "b"]}, arity=3)
    sm = SupportModel.from_supports(s, {"C1": ["02", "21", "11"]})
    assert sorted(g.values_for(("a", "b")) for g in enumerate_global_sections(sm)) == [(0, 2), (1, 1), (2, 1)]


def test_bell_extension(models):
    bell = models["bell"]
    r = extend_section(bell, parse_seed(bell, "C1:11"))
    assert r.success
    assert r.extension in (bell_g(X_A=1, X_B=1, Z_A=0, Z_B=0), bell_g(X_A=1, X_B=1, Z_A=1, Z_B=1))
    successes = [n for n in r.trace.nodes() if n.status == "success"]
    assert len(successes) == 1 and not successes[0].children
    ok_paths = [p for p in r.trace.paths() if p[-1].status == "success"]
    assert len(ok_paths) == 1


def test_cluster_teal_triangle_extends(models):
    cl = models["cluster-ring-5"]
    r = extend_section(cl, parse_seed(cl, "C2:000"))
    assert r.success
    globals_ = brute_force_globals(cl)
    assert any(all(v == 0 for v in g.values()) for g in globals_)
    assert all(v in (0, 1) for _, v in r.extension.items)


def test_seed_must_be_supported(models):
    bell = models["bell"]
    with pytest.raises(ModelError):
        extend_section(bell, parse_seed(bell, "C1:10"))
    with pytest.raises(ModelError):
        extend_section(bell, Section.of({"X_A": 0}))
    with pytest.raises(ModelError):
        parse_seed(bell, "C1-10")


def test_trace_markers_on_ghz(models):
    ghz = models["ghz-ab"]
    r = extend_section(ghz, parse_seed(ghz, "C1:111"))
    markers = {n.marker for n in r.trace.nodes() if n.kind == "assign"}
    assert "+" in markers and "*" in markers
    for n in r.trace.nodes():
        if n.marker == "+":
            assert n.status == "incompatible" and not n.children


def test_one_node_trace_for_single_context():
    s = Scenario.build(["a", "b"], {"C": ["a", "b"]})
    sm = SupportModel.from_supports(s, {"C": ["01"]})
    r = extend_section(sm, parse_seed(sm, "C:01"))
    assert r.success and len(r.trace) == 1 and r.trace.root.status == "success"


def test_classify_levels(models):
    assert classify(models["bell"]).level == NONCONTEXTUAL
    assert classify(models["pr-box"]).level == STRONG
    assert classify(models["ghz-ab"]).level == STRONG
    assert classify(models["cluster-ring-5"]).level == NONCONTEXTUAL


def test_noncontextual_witness_lists_every_section(models):
    c = classify(models["bell"])
    entries = c.witness["extensions"]
    assert len(entries) == 12
    for e in entries:
        g = GlobalAssignment(tuple(e["global"].items()))
        assert is_global_section(models["bell"], g)


def test_logical_contextuality_witness():
    # Hardy-style: one section of C1 cannot extend, but global sections exist
    s = Scenario.build(["a", "b", "c"], {"C1": ["a", "b"], "C2": ["b", "c"], "C3": ["a", "c"]})
    sm = SupportModel.from_supports(s, {"C1": ["00", "11"], "C2": ["00"], "C3": ["00", "01", "10", "11"]})
    c = classify(sm)
    assert c.level == LOGICAL == oracle_classification(sm)
    assert c.witness["kind"] == "non_extendable_section"
    assert (c.witness["context"], c.witness["tuple"]) == ("C1", "11")


def test_strong_without_parity_uses_exhaustion():
    s = Scenario.build(["a", "b"], {"C1": ["a"], "C2": ["b"]}, arity=3)
    sm = SupportModel.from_supports(s, {"C1": ["2"], "C2": ["0"]})
    assert classify(sm).level == NONCONTEXTUAL
    s = Scenario.build(["a", "b", "c"], {"C1": ["a", "b"], "C2": ["b", "c"], "C3": ["a", "c"]})
    sm = SupportModel.from_supports(s, {"C1": ["01", "10"], "C2": ["01", "10"], "C3": ["01"]})
    assert isinstance(build_parity_system(sm), NotParityModel)
    c = classify(sm)
    assert c.level == STRONG and c.witness["kind"] == "exhaustion"
    pr = classify(support_of(preset("pr-box")[1]), use_parity=False)
    assert pr.level == STRONG and pr.witness["kind"] == "exhaustion"


def test_forged_witness_is_caught(models):
    bell = models["bell"]
    with pytest.raises(CertificateError):
        verify_classification(bell, Classification(STRONG, {"kind": "exhaustion", "context": "C1", "tuples": []}))
    with pytest.raises(CertificateError):
        verify_classification(
            models["ghz-ab"], Classification(NONCONTEXTUAL, {"kind": "extensions", "extensions": []})
        )


def test_parity_systems(models):
    ghz = build_parity_system(models["ghz-ab"])
    assert [r.rhs for r in ghz.rows] == [1, 1, 1, 0] and len(ghz.variables) == 6
    pr = build_parity_system(models["pr-box"])
    assert [r.rhs for r in pr.rows] == [0, 0, 0, 1]
    bell = build_parity_system(models["bell"])
    assert [(r.context, r.rhs) for r in bell.rows] == [("C1", 0), ("C4", 0)]
    assert bell.describe()[0] == "C1: X_A + X_B = 0"


def test_parity_obstruction_examples(models):
    for name in ("ghz-ab", "pr-box"):
        cert = parity_obstruction(build_parity_system(models[name]))
        assert isinstance(cert, ParityContradiction) and len(cert.rows) == 4
    sol = parity_obstruction(build_parity_system(models["cluster-ring-5"]))
    assert isinstance(sol, ParitySolution)
    assert all(v == 0 for _, v in sol.assignment.items)
    assert len(build_parity_system(models["cluster-ring-5"]).rows) == 10


def test_parity_certificate_is_minimal():
    ps = ParitySystem(
        ("a", "b", "c"),
        (ParityRow("R1", ("a",), 0), ParityRow("R2", ("b", "c"), 1), ParityRow("R3", ("a",), 1)),
    )
    cert = parity_obstruction(ps)
    assert cert.rows == ("R1", "R3") and cert.verify(ps)


def test_non_parity_models():
    s = Scenario.build(["a", "b"], {"C": ["a", "b"]}, arity=3)
    assert isinstance(build_parity_system(SupportModel.from_supports(s, {"C": ["00"]})), NotParityModel)
    s = Scenario.build(["a", "b"], {"C": ["a", "b"]})
    out = build_parity_system(SupportModel.from_supports(s, {"C": ["00", "01", "11"]}))
    assert isinstance(out, NotParityModel) and out.context == "C"
