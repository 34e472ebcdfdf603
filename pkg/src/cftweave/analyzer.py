"""Qualitative fault-tree analysis: cutsets and Boolean reduction.

Cutsets come from top-down product expansion over leaf display names (the
classic AND-distributes-over-OR walk, memoised per shared node).  Two report
stages exist:

* ``pre``: the expanded products as-is, deduplicated but without absorption,
  with every display-named leaf treated as its own atom.  This is the list a
  reviewer compares against the woven structure, where one physical cause
  may legitimately appear once per dependent.
* ``reduced``: display names are mapped to event identities (collapsing
  common causes), idempotence inside each set and absorption across sets are
  applied, yielding the unique minimal disjunctive normal form of the
  monotone tree function.

NOT gates make cutset semantics undefined here and are rejected; use
:func:`evaluate` for pointwise checks of non-coherent trees.  The brute-force
route for certifying these results lives in :mod:`cftweave.oracle`, not
here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import AnalysisError
from .model import GateKind
from .synthesizer import FaultTree, FTGate, FTLeaf

STAGES = ("pre", "reduced")


@dataclass(frozen=True)
class CutSet:
    """One product of failure atoms, with display names and identities."""

    displays: tuple[str, ...]
    identities: frozenset[str]

    def render(self) -> str:
        return " ∧ ".join(self.displays)


@dataclass(frozen=True)
class CutSetReport:
    """Cutsets ordered by ascending cardinality, then lexicographically."""

    stage: str
    cutsets: tuple[CutSet, ...]

    def lines(self) -> tuple[str, ...]:
        return tuple(cs.render() for cs in self.cutsets)

    def display_sets(self) -> set[frozenset[str]]:
        return {frozenset(cs.displays) for cs in self.cutsets}

    def identity_sets(self) -> set[frozenset[str]]:
        return {cs.identities for cs in self.cutsets}


def _expand_products(root) -> tuple[frozenset[str], ...]:
    memo: dict[int, tuple[frozenset[str], ...]] = {}

    def dedup(sets) -> tuple[frozenset[str], ...]:
        return tuple(dict.fromkeys(sets))

    def go(node) -> tuple[frozenset[str], ...]:
        if id(node) in memo:
            return memo[id(node)]
        if isinstance(node, FTLeaf):
            result = (frozenset((node.display,)),)
        elif node.kind is GateKind.OR:
            result = dedup(s for child in node.children for s in go(child))
        else:  # AND
            acc: tuple[frozenset[str], ...] = (frozenset(),)
            for child in node.children:
                acc = dedup(a | b for a in acc for b in go(child))
            result = acc
        memo[id(node)] = result
        return result

    return go(root)


def _absorb(sets) -> tuple[frozenset[str], ...]:
    """Keep only minimal sets; processing by ascending size makes one pass
    sufficient."""
    kept: list[frozenset[str]] = []
    for candidate in sorted(set(sets), key=lambda s: (len(s), tuple(sorted(s)))):
        if not any(k <= candidate for k in kept):
            kept.append(candidate)
    return tuple(kept)


def _report_key(cs: CutSet) -> tuple[int, tuple[str, ...]]:
    return (len(cs.displays), cs.displays)


def cutsets(tree: FaultTree, stage: str = "reduced") -> CutSetReport:
    """Compute the cutset report for a coherent tree at the given stage."""
    if stage not in STAGES:
        raise AnalysisError(f"unknown stage '{stage}', expected one of {STAGES}")
    if tree.root is None:
        raise AnalysisError("empty tree")
    for node in tree.nodes():
        if isinstance(node, FTGate) and node.kind is GateKind.NOT:
            raise AnalysisError("non-coherent tree: cutset semantics undefined")

    identity_of: dict[str, str] = {}
    for leaf in tree.leaves():
        known = identity_of.get(leaf.display)
        if known is not None and known != leaf.identity:
            raise AnalysisError(
                f"display name '{leaf.display}' maps to several identities")
        identity_of[leaf.display] = leaf.identity

    products = _expand_products(tree.root)
    if stage == "pre":
        sets = [CutSet(displays=tuple(sorted(p)),
                       identities=frozenset(identity_of[d] for d in p))
                for p in products]
        return CutSetReport("pre", tuple(sorted(sets, key=_report_key)))

    reduced = _absorb(frozenset(identity_of[d] for d in p) for p in products)

    displays_per_identity: dict[str, set[str]] = {}
    for leaf in tree.leaves():
        displays_per_identity.setdefault(leaf.identity, set()).add(leaf.display)
    # An identity seen under one display keeps it; one seen under several
    # (a collapsed common cause) falls back to the identity itself.
    display_of = {ident: (next(iter(ds)) if len(ds) == 1 else ident)
                  for ident, ds in displays_per_identity.items()}

    sets = [CutSet(displays=tuple(sorted(display_of[i] for i in p)), identities=p)
            for p in reduced]
    return CutSetReport("reduced", tuple(sorted(sets, key=_report_key)))


def evaluate(tree: FaultTree, assignment) -> bool:
    """Evaluate the tree under a truth assignment keyed by event identity.

    The assignment must cover every leaf identity, including external ones.
    NOT gates are supported here (unlike in cutset analysis).
    """
    if tree.root is None:
        raise AnalysisError("empty tree")
    missing = sorted({leaf.identity for leaf in tree.leaves()} - set(assignment))
    if missing:
        raise AnalysisError("assignment missing identities: " + ", ".join(missing))

    memo: dict[int, bool] = {}

    def go(node) -> bool:
        if id(node) in memo:
            return memo[id(node)]
        if isinstance(node, FTLeaf):
            value = bool(assignment[node.identity])
        elif node.kind is GateKind.AND:
            value = all(go(child) for child in node.children)
        elif node.kind is GateKind.OR:
            value = any(go(child) for child in node.children)
        else:
            value = not go(node.children[0])
        memo[id(node)] = value
        return value

    return go(tree.root)
