"""Parser, canonical serializer and DOT export."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cftweave import (
    ParseError,
    export_dot,
    fixture_text,
    parse,
    serialize,
    synthesize,
    weave,
)

import genmodels

# The fig2 system again, deliberately declared in a different order than the
# canonical fixture: same model, different document.
SHUFFLED_FIG2 = """\
layer sw
layer hw

component f1 in sw {
  out p3
  in p2
  in p1
  infm loss-of@p1
  infm loss-of@p2
  gate and1 = AND(loss-of@p1, loss-of@p2)
  outfm loss-of@p3 = and1
}

component f2 in sw {
  in p4
  infm loss-of@p4
  outfm loss-of = loss-of@p4
}

component RAM in hw {
  out p5
  event b
  outfm loss-of@p5 = b
}

component CPU in hw {
  in p6
  event a
  infm loss-of@p6
  gate or1 = OR(a, loss-of@p6)
  outfm loss-of = or1
}

connect f1.p3 -> f2.p4
connect RAM.p5 -> CPU.p6

alfred f2 -> RAM
alfred f1 -> RAM
alfred f1 -> CPU
"""


class TestParse:
    def test_layered_example_document(self, fig2):
        model = parse(SHUFFLED_FIG2)
        assert model == fig2
        f1 = model.component("f1")
        f2 = model.component("f2")
        ram = model.component("RAM")
        cpu = model.component("CPU")
        assert f1.in_ports == ("p1", "p2") and f1.out_ports == ("p3",)
        assert f2.in_ports == ("p4",) and f2.out_ports == ()
        assert ram.in_ports == () and ram.out_ports == ("p5",)
        assert cpu.in_ports == ("p6",) and cpu.out_ports == ()
        assert {(c.from_component, c.from_port, c.to_component, c.to_port)
                for c in model.connections} == {("f1", "p3", "f2", "p4"),
                                                ("RAM", "p5", "CPU", "p6")}
        assert model.providers_of("f1") == ("CPU", "RAM")
        assert model.providers_of("f2") == ("RAM",)
        assert model.providers_of("CPU") == () == model.providers_of("RAM")

    def test_empty_document(self):
        with pytest.raises(ParseError, match="no layer declared"):
            parse("")

    def test_unknown_keyword_location(self):
        with pytest.raises(ParseError) as err:
            parse("layer l\nfloor x\n")
        assert err.value.line == 2
        assert err.value.column == 1
        assert err.value.token == "floor"
        assert "layer" in err.value.expected

    def test_truncated_statement_points_past_line_end(self):
        with pytest.raises(ParseError) as err:
            parse("layer l\nconnect a.b ->\n")
        assert err.value.line == 2
        assert err.value.column == len("connect a.b ->") + 1

    def test_reference_to_undeclared_node(self):
        with pytest.raises(ParseError, match="undeclared"):
            parse("layer l\n\ncomponent c in l {\n  gate g = OR(ghost)\n}\n")

    def test_reference_to_undeclared_component(self):
        with pytest.raises(ParseError, match="undeclared component"):
            parse("layer l\n\ncomponent c in l {\n  out p\n}\n\nconnect c.p -> d.q\n")

    def test_duplicate_component(self):
        text = "layer l\n\ncomponent c in l {\n}\n\ncomponent c in l {\n}\n"
        with pytest.raises(ParseError, match="duplicate declaration"):
            parse(text)

    def test_duplicate_event(self):
        with pytest.raises(ParseError, match="duplicate declaration"):
            parse("layer l\n\ncomponent c in l {\n  event e\n  event e\n}\n")

    def test_unknown_gate_kind(self):
        with pytest.raises(ParseError) as err:
            parse("layer l\n\ncomponent c in l {\n  event e\n  gate g = XOR(e)\n}\n")
        assert set(err.value.expected) == {"AND", "OR", "NOT"}

    def test_unclosed_component_block(self):
        with pytest.raises(ParseError, match="end of file"):
            parse("layer l\n\ncomponent c in l {\n  event e\n")

    def test_self_alias_rejected(self):
        text = ("layer l\n\ncomponent c in l {\n  event e\n}\n\n"
                "common-cause c.e = c.e\n")
        with pytest.raises(ParseError, match="itself"):
            parse(text)

    def test_comments_and_blank_lines(self):
        text = ("# heading\nlayer l   # trailing\n\n"
                "component c in l {\n  # inner\n  event e\n}\n")
        model = parse(text)
        assert model.component("c").cft.event("e") is not None

    def test_crlf_accepted(self):
        model = parse("layer l\r\n\r\ncomponent c in l {\r\n  event e\r\n}\r\n")
        assert model.component("c").cft.event("e") is not None

    def test_unexpected_character(self):
        with pytest.raises(ParseError, match="unexpected character"):
            parse("layer l$\n")


class TestSerialize:
    def test_roundtrip_fixtures(self, fig2, vehicle):
        assert parse(serialize(fig2)) == fig2
        assert parse(serialize(vehicle)) == vehicle

    def test_canonical_idempotence(self, fig2, vehicle):
        for model in (fig2, vehicle):
            once = serialize(model)
            assert serialize(parse(once)) == once

    def test_permutations_serialize_identically(self):
        assert serialize(parse(SHUFFLED_FIG2)) == fixture_text("example_fig2")

    def test_vehicle_file_is_its_own_golden(self, vehicle):
        assert serialize(vehicle) == fixture_text("vehicle")

    def test_alias_star_form(self):
        chain = ("layer l\n\n"
                 "component a in l {\n  event e\n}\n\n"
                 "component b in l {\n  event e\n}\n\n"
                 "component c in l {\n  event e\n}\n\n"
                 "common-cause c.e = b.e\n\ncommon-cause b.e = a.e\n")
        model = parse(chain)
        assert [(cc.a.render(), cc.b.render()) for cc in model.common_causes] == [
            ("a.e", "b.e"), ("a.e", "c.e")]
        assert parse(serialize(model)) == model

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**6))
    def test_roundtrip_generated(self, seed):
        model, _ = genmodels.random_model(seed)
        assert parse(serialize(model)) == model
        assert serialize(parse(serialize(model))) == serialize(model)


class TestParserTotality:
    @settings(max_examples=200, deadline=None)
    @given(st.text(max_size=300))
    def test_any_text_parses_or_raises_parse_error(self, text):
        try:
            parse(text)
        except ParseError:
            pass

    @settings(max_examples=100, deadline=None)
    @given(st.text(alphabet="layercomnt {}()=@->.#\n podfgi", max_size=200))
    def test_keyword_like_soup(self, text):
        try:
            parse(text)
        except ParseError:
            pass


class TestDot:
    def test_fig2_has_three_dashed_edges(self, fig2):
        assert export_dot(fig2).count("style=dashed") == 3

    def test_single_component_single_cluster(self):
        model = parse("layer l\n\ncomponent c in l {\n  event e\n  outfm f = e\n}\n")
        assert export_dot(model).count("subgraph") == 1

    def test_braces_balanced(self, fig2, vehicle):
        for model in (fig2, vehicle):
            dot = export_dot(model)
            assert dot.count("{") == dot.count("}")

    def test_tree_has_single_root(self, fig2):
        tree = synthesize(weave(fig2), "f2.loss-of")
        dot = export_dot(tree)
        nodes = {line.split()[0] for line in dot.splitlines()
                 if line.startswith("  n") and "[" in line}
        targets = {line.split("->")[1].strip().rstrip(";")
                   for line in dot.splitlines() if "->" in line}
        roots = nodes - targets
        assert roots == {"n0"}

    def test_tree_externals_are_triangles(self, fig2):
        tree = synthesize(weave(fig2), "f2.loss-of")
        dot = export_dot(tree)
        assert dot.count("shape=triangle") == 2

    def test_deterministic(self, vehicle):
        assert export_dot(vehicle) == export_dot(vehicle)

    def test_rejects_other_types(self):
        with pytest.raises(TypeError):
            export_dot("not a model")
