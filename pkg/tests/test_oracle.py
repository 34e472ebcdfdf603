"""Truth-table oracle: direct network evaluation and equivalence checks."""

import pytest

from cftweave import (
    FaultTree,
    FTBasicEvent,
    FTGate,
    GateKind,
    OracleError,
    TopEventRef,
    cutsets,
    equivalent,
    parse,
    synthesize,
    table_of_cutsets,
    table_of_network,
    table_of_tree,
    weave,
)

import genmodels


def leaf(identity):
    return FTBasicEvent(identity=identity, display=identity)


def tree_of(root):
    return FaultTree(root=root, top=TopEventRef("t", "t"))


def test_fig2_network_table_matches_hand_enumeration(fig2):
    table = table_of_network(weave(fig2), "f2.loss-of")
    assert table.variables == ("CPU.a", "RAM.b",
                               "ext@f1.p1.loss-of", "ext@f1.p2.loss-of")
    assert table.rows == 16
    for index in range(16):
        a = bool(index & 1)
        b = bool(index & 2)
        e1 = bool(index & 4)
        e2 = bool(index & 8)
        assert table.verdict(index) == (a or b or (e1 and e2)), index


def test_single_event_network_is_identity():
    model = parse("layer l\n\ncomponent c in l {\n  event e\n  outfm f = e\n}\n")
    table = table_of_network(model, "c.f")
    assert table.variables == ("c.e",)
    assert table.bits == 0b10


def test_equivalent_to_itself(fig2):
    table = table_of_network(weave(fig2), "f2.loss-of")
    assert equivalent(table, table)


def test_generated_tree_equivalent_to_reduced_shape(fig2):
    woven = weave(fig2)
    generated = synthesize(woven, "f2.loss-of")
    reduced_shape = tree_of(FTGate(GateKind.OR, (
        leaf("CPU.a"), leaf("RAM.b"),
        FTGate(GateKind.AND, (leaf("ext@f1.p1.loss-of"),
                              leaf("ext@f1.p2.loss-of"))))))
    order = table_of_network(woven, "f2.loss-of").variables
    assert equivalent(table_of_tree(generated, variables=order),
                      table_of_tree(reduced_shape, variables=order))


def test_dropping_a_disjunct_is_detected(fig2):
    woven = weave(fig2)
    generated = synthesize(woven, "f2.loss-of")
    order = table_of_tree(generated).variables
    without_b = tree_of(FTGate(GateKind.OR, (
        leaf("CPU.a"),
        FTGate(GateKind.AND, (leaf("ext@f1.p1.loss-of"),
                              leaf("ext@f1.p2.loss-of"))))))
    assert not equivalent(table_of_tree(generated, variables=order),
                          table_of_tree(without_b, variables=order))


def test_leaf_order_mismatch_rejected(fig2):
    table = table_of_network(weave(fig2), "f2.loss-of")
    other = table_of_tree(tree_of(leaf("CPU.a")))
    with pytest.raises(OracleError, match="leaf-order mismatch"):
        equivalent(table, other)


def test_identity_budget_enforced():
    wide = tree_of(FTGate(GateKind.OR, tuple(leaf(f"v{i:02d}") for i in range(25))))
    with pytest.raises(OracleError, match="identity budget exceeded"):
        table_of_tree(wide)


def test_external_policy_pinned_false(fig2):
    free = table_of_network(fig2, "f1.loss-of")
    assert free.variables == ("ext@f1.p1.loss-of", "ext@f1.p2.loss-of")
    assert free.bits == 0b1000  # AND of the two external inputs
    pinned = table_of_network(fig2, "f1.loss-of", external_policy="false")
    assert pinned.variables == ()
    assert pinned.bits == 0

    with pytest.raises(OracleError, match="external policy"):
        table_of_network(fig2, "f1.loss-of", external_policy="maybe")


def test_variables_must_cover_network(fig2):
    with pytest.raises(OracleError, match="do not cover"):
        table_of_network(weave(fig2), "f2.loss-of", variables=("CPU.a",))


def test_unknown_top(fig2):
    with pytest.raises(OracleError, match="unknown top event"):
        table_of_network(fig2, "f2.nope")


def test_table_of_cutsets_against_evaluated_dnf():
    sets = [frozenset({"a"}), frozenset({"b", "c"})]
    table = table_of_cutsets(sets)
    assert table.variables == ("a", "b", "c")
    for index in range(table.rows):
        truth = {v for bit, v in enumerate(table.variables) if index & (1 << bit)}
        assert table.verdict(index) == any(s <= truth for s in sets)


def test_network_tree_and_dnf_agree_on_sample():
    for seed in range(60):
        model, tops = genmodels.random_model(seed)
        woven = weave(model)
        for top in tops:
            t_net = table_of_network(woven, top)
            tree = synthesize(woven, top)
            t_tree = table_of_tree(tree, variables=t_net.variables)
            reduced = cutsets(tree, "reduced")
            t_dnf = table_of_cutsets([cs.identities for cs in reduced.cutsets],
                                     variables=t_net.variables)
            assert equivalent(t_net, t_tree), f"seed={seed}"
            assert equivalent(t_net, t_dnf), f"seed={seed}"


def test_verdict_bounds(fig2):
    table = table_of_network(weave(fig2), "f2.loss-of")
    with pytest.raises(OracleError, match="out of range"):
        table.verdict(table.rows)


def test_not_gate_masks():
    table = table_of_tree(tree_of(FTGate(GateKind.NOT, (leaf("x"),))))
    assert table.variables == ("x",)
    assert table.verdict(0) is True and table.verdict(1) is False
