import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wforge import oracles
from wforge.circuit import (
    Builder,
    Circuit,
    GateInstance,
    ParseError,
    ResourceReport,
    UnknownMacroError,
    compose,
    count_resources,
    depth,
    expand,
    get_macro,
    inverse,
    load,
    macro_census,
    parse,
    save,
    serialize,
)
from wforge.core import InvalidArgument, RadixRegister
from wforge.sim import circuit_unitary
from wforge.synth import synth_spread_tree, synth_zcx


def test_builder_and_validation():
    c = Builder().add("H", 0).add("CX", 0, 1).add("SQRTZ", 1, dag=True).build([3, 3])
    assert len(c) == 3 and c.dims == (3, 3) and c.data_wires == (0, 1)
    with pytest.raises(InvalidArgument):
        Builder().add("CX", 0, 0).build([3, 3])
    with pytest.raises(InvalidArgument):
        Builder().add("CX", 0, 1).build([2, 3])
    with pytest.raises(InvalidArgument):
        Builder().add("H", 2).build([3, 3])
    with pytest.raises(InvalidArgument):
        Builder().add("T2", 0).build([3])
    with pytest.raises(InvalidArgument):
        Builder().add("FOO", 0).build([3])
    with pytest.raises(InvalidArgument):
        Builder().build([3], ancillas=[1])


def test_unknown_macro_lookup():
    with pytest.raises(UnknownMacroError):
        get_macro("NOT_A_MACRO")


def test_inverse_composes_to_identity():
    c = Builder().add("H", 0).add("CX", 0, 1, p=2).add("SQRTZ", 1).add("P1", 0, k=1).add("S", 1).build([3, 3])
    U = circuit_unitary(compose(c, inverse(c)))
    assert np.abs(U - np.eye(9)).max() < 1e-12


def test_expand_lowers_p1_and_drops_only_global_phase():
    c = Builder().add("P1", 0, k=2).build([5])
    e = expand(c)
    assert all(g.name in ("X", "SQRTZ") for g in e.gates)
    U = circuit_unitary(e)
    zeta = np.exp(2j * np.pi / 25)
    assert np.abs(zeta * U - oracles.p1(5, 2)).max() < 1e-12


def test_zalpha_lowering_uses_short_side():
    # exponent 4 at d=5 lowers to one P1 dagger, not four P1
    c = Builder().add("ZALPHA", 0, alpha=[0, 0, 4, 0, 1]).build([5])
    rep = count_resources(expand(c))
    assert rep.total_sqrtz == 4
    U = circuit_unitary(expand(c))
    V = oracles.diagonal(5, [0, 0, 4, 0, 1])
    ph = U[0, 0] / V[0, 0]
    assert np.abs(U - ph * V).max() < 1e-12


def test_count_requires_expansion():
    res = synth_zcx(3)
    with pytest.raises(InvalidArgument):
        count_resources(res.circuit)
    with pytest.raises(InvalidArgument):
        count_resources(Builder().add("P1", 0, k=0).build([3]))


def test_counts_known_values():
    assert count_resources(expand(synth_zcx(3).circuit)).total_sqrtz == 3
    rep = count_resources(Builder().add("T2", 0).add("T2", 0, dag=True).add("CX", 0, 1).build([2, 2]))
    assert rep.t_count == 2 and rep.non_clifford == {2: 2} and rep.two_qudit == 1 and rep.gates == 3


def test_depth_asap():
    c = Builder().add("H", 0).add("H", 1).add("CX", 0, 1).add("H", 2).build([3, 3, 3])
    assert depth(c) == 2
    assert depth(Builder().build([2])) == 0


def test_macro_census_counts_nested():
    res = synth_spread_tree(2, 2)
    cen = macro_census(res.circuit)
    assert cen["WPRIME"] == 1 and cen["SPREAD"] == 2


def test_daggered_macro_is_inverse():
    g = GateInstance.make("ZCX", (0, 1), k=1, p=1, exact=True)
    c = Circuit(RadixRegister([3, 3]), (g, g.inverse()))
    assert np.abs(circuit_unitary(expand(c)) - np.eye(9)).max() < 1e-10


def test_serialize_layout_and_round_trip(tmp_path):
    c = Builder().add("ZALPHA", 1, alpha=[0, 2, 2]).add("CX", 0, 1, p=2).add("H", 0, dag=True).build([3, 3])
    text = serialize(c)
    lines = text.splitlines()
    assert lines[0] == "{" and '"version": 1' in lines[1]
    assert '{"g": "ZALPHA", "w": [1], "p": {"alpha": [0, 2, 2]}, "dag": false}' in text
    assert parse(text) == c and serialize(parse(text)) == text
    path = tmp_path / "c.json"
    save(c, str(path))
    assert load(str(path)) == c


def _doc(**over):
    doc = {"version": 1, "dims": [3, 3], "ancillas": [], "gates": [{"g": "H", "w": [0], "p": {}, "dag": False}]}
    doc.update(over)
    return json.dumps(doc)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("not json", "$: not valid JSON"),
        ("[]", "$: document must be an object"),
        (_doc(extra=1), "unknown field"),
        (_doc(version=2), "$.version"),
        (_doc(dims=[3, 4]), "$.dims"),
        (_doc(dims=[]), "$.dims"),
        (_doc(gates=[{"g": "Q", "w": [0]}]), "$.gates[0].g"),
        (_doc(gates=[{"g": "H", "w": [5]}]), "$.gates[0]"),
        (_doc(gates=[{"g": "H", "w": [0], "x": 1}]), "$.gates[0]: unknown field"),
        (_doc(gates=[{"g": "H", "w": "0"}]), "$.gates[0].w"),
        (_doc(gates=[{"g": "H", "w": [0], "dag": 1}]), "$.gates[0].dag"),
        (_doc(gates=[{"g": "P1", "w": [0], "p": {"k": 7}}]), "P1"),
        (_doc(gates=[{"g": "P1", "w": [0], "p": {"k": 1.5}}]), "$.gates[0].p.k"),
        (_doc(ancillas=[9]), "$.ancillas"),
    ],
)
def test_parse_errors_name_the_path(text, fragment):
    with pytest.raises(ParseError) as ei:
        parse(text)
    assert fragment in str(ei.value)


GATES_1 = ["X", "Z", "S", "H", "SQRTZ"]


@st.composite
def random_circuits(draw):
    d = draw(st.sampled_from([2, 3, 5]))
    n = draw(st.integers(1, 3))
    b = Builder()
    for _ in range(draw(st.integers(0, 12))):
        if n > 1 and draw(st.booleans()):
            a, t = draw(st.permutations(range(n)))[:2]
            b.add("CX", a, t, dag=draw(st.booleans()))
        else:
            b.add(draw(st.sampled_from(GATES_1)), draw(st.integers(0, n - 1)), dag=draw(st.booleans()))
    return b.build([d] * n)


@settings(max_examples=60, deadline=None)
@given(random_circuits())
def test_round_trip_property(c):
    text = serialize(c)
    assert parse(text) == c
    assert serialize(parse(text)) == text


@settings(max_examples=60, deadline=None)
@given(random_circuits(), random_circuits())
def test_count_additivity_and_depth_bounds(a, b):
    if a.register != b.register:
        return
    ra, rb, rab = count_resources(a), count_resources(b), count_resources(compose(a, b))
    s = ra + rb
    assert rab.sqrtz == s.sqrtz and rab.non_clifford == s.non_clifford
    assert rab.gates == s.gates and rab.two_qudit == s.two_qudit and rab.t_count == s.t_count
    assert max(ra.depth, rb.depth) <= rab.depth <= ra.depth + rb.depth
    assert rab.depth <= rab.gates


@settings(max_examples=30, deadline=None)
@given(random_circuits())
def test_inverse_property(c):
    U = circuit_unitary(compose(c, inverse(c)))
    assert np.abs(U - np.eye(U.shape[0])).max() < 1e-10


def test_report_addition_drops_zero_entries():
    r = ResourceReport(sqrtz={3: 1}) + ResourceReport(sqrtz={5: 2})
    assert r.sqrtz == {3: 1, 5: 2} and r.total_sqrtz == 3
