"""Immutable domain model for layered architectures with component fault trees.

An :class:`ArchitectureModel` holds vertical layers, components with typed
ports, the data-flow connections between ports, directed cross-layer failure
dependencies (``alfred`` edges), and common-cause aliases that give two basic
events a single identity.  Each component may carry a component fault tree
(CFT): a small Boolean graph of basic events, gates, input failure modes and
output failure modes.

All types are frozen dataclasses.  Construction canonicalises ordering
(layers, components, connections, dependencies and CFT members are sorted),
so two models built from the same declarations in any order compare equal,
and every downstream artifact is byte-stable.  Construction never rejects
anything beyond basic typing; structural rules are checked by
:func:`validate`, which reports findings instead of raising.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum

from .errors import ModelError

#: Legal name: ASCII letters, digits, ``_`` and ``-``.  ``.`` is reserved as
#: the qualifier separator in rendered names (``U1.False-negative``).
IDENTIFIER_PATTERN = re.compile(r"[A-Za-z0-9_-]+\Z")


def is_identifier(text: str) -> bool:
    """True if *text* is a legal name token."""
    return bool(IDENTIFIER_PATTERN.match(text))


class GateKind(Enum):
    AND = "AND"
    OR = "OR"
    NOT = "NOT"


@dataclass(frozen=True)
class NodeRef:
    """Reference to a node inside one component's fault tree.

    Port-bound failure modes are addressed as ``name@port``; basic events,
    gates and port-less failure modes by bare name.
    """

    name: str
    port: str | None = None

    def render(self) -> str:
        return f"{self.name}@{self.port}" if self.port else self.name


@dataclass(frozen=True)
class BasicEvent:
    """Atomic internal failure cause of one component."""

    name: str


@dataclass(frozen=True)
class Gate:
    """Boolean gate combining other nodes of the same fault tree."""

    name: str
    kind: GateKind
    inputs: tuple[NodeRef, ...]


@dataclass(frozen=True)
class InputFailureMode:
    """Failure entering a component, either through an in-port or port-less.

    Port-less input failure modes are either externally supplied failure
    behaviour or weaving artifacts resolved through a provenance table.
    """

    name: str
    port: str | None = None


@dataclass(frozen=True)
class OutputFailureMode:
    """Failure visible at a component output, driven by exactly one node."""

    name: str
    port: str | None
    driver: NodeRef


def _fm_key(fm) -> tuple[str, str]:
    return (fm.name, fm.port or "")


@dataclass(frozen=True)
class ComponentFaultTree:
    """Boolean failure model of one component.

    Events, gates and port-less input failure modes share one bare-name
    namespace for references; port-bound failure modes live in a
    ``(name, port)`` namespace per kind.
    """

    events: tuple[BasicEvent, ...] = ()
    gates: tuple[Gate, ...] = ()
    input_fms: tuple[InputFailureMode, ...] = ()
    output_fms: tuple[OutputFailureMode, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(sorted(self.events, key=lambda e: e.name)))
        object.__setattr__(self, "gates", tuple(sorted(self.gates, key=lambda g: g.name)))
        object.__setattr__(self, "input_fms", tuple(sorted(self.input_fms, key=_fm_key)))
        object.__setattr__(self, "output_fms", tuple(sorted(self.output_fms, key=_fm_key)))

    def event(self, name: str) -> BasicEvent | None:
        return next((e for e in self.events if e.name == name), None)

    def gate(self, name: str) -> Gate | None:
        return next((g for g in self.gates if g.name == name), None)

    def input_fm(self, name: str, port: str | None) -> InputFailureMode | None:
        return next((i for i in self.input_fms if i.name == name and i.port == port), None)

    def output_fm(self, name: str, port: str | None) -> OutputFailureMode | None:
        return next((o for o in self.output_fms if o.name == name and o.port == port), None)

    def output_fms_named(self, name: str) -> tuple[OutputFailureMode, ...]:
        return tuple(o for o in self.output_fms if o.name == name)

    def resolve(self, ref: NodeRef):
        """Resolve a reference to its node, or None."""
        if ref.port is not None:
            return self.input_fm(ref.name, ref.port)
        node = self.event(ref.name)
        if node is None:
            node = self.gate(ref.name)
        if node is None:
            node = self.input_fm(ref.name, None)
        return node


@dataclass(frozen=True)
class Component:
    """A component on one layer, with ordered ports and an optional CFT."""

    name: str
    layer: str
    in_ports: tuple[str, ...] = ()
    out_ports: tuple[str, ...] = ()
    cft: ComponentFaultTree | None = None

    def __post_init__(self):
        object.__setattr__(self, "in_ports", tuple(sorted(self.in_ports)))
        object.__setattr__(self, "out_ports", tuple(sorted(self.out_ports)))


@dataclass(frozen=True)
class PortConnection:
    """Data flow from one component's out-port to another's in-port."""

    from_component: str
    from_port: str
    to_component: str
    to_port: str

    def render(self) -> str:
        return (f"{self.from_component}.{self.from_port}"
                f" -> {self.to_component}.{self.to_port}")


@dataclass(frozen=True)
class AlfredDependency:
    """Directed cross-layer edge: *dependent* needs *provider* to function.

    Carries no data flow; it only marks that every failure of the provider
    must be assumed to trigger every output failure mode of the dependent.
    """

    dependent: str
    provider: str

    def render(self) -> str:
        return f"{self.dependent} -> {self.provider}"


@dataclass(frozen=True)
class EventRef:
    """Model-wide reference to one basic event."""

    component: str
    event: str

    def render(self) -> str:
        return f"{self.component}.{self.event}"


@dataclass(frozen=True)
class CommonCause:
    """Alias declaration: two basic events share one physical cause."""

    a: EventRef
    b: EventRef


def _alias_groups(pairs) -> dict[str, list[EventRef]]:
    """Union-find over alias pairs; keys are the lexicographically smallest
    rendered member of each group."""
    parent: dict[str, str] = {}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    refs: dict[str, EventRef] = {}
    for cc in pairs:
        for ref in (cc.a, cc.b):
            key = ref.render()
            refs[key] = ref
            parent.setdefault(key, key)
        ra, rb = find(cc.a.render()), find(cc.b.render())
        if ra != rb:
            lo, hi = sorted((ra, rb))
            parent[hi] = lo
    groups: dict[str, list[EventRef]] = {}
    for key in sorted(refs):
        groups.setdefault(find(key), []).append(refs[key])
    return groups


@dataclass(frozen=True)
class ArchitectureModel:
    """The model universe consumed by every pipeline stage."""

    layers: tuple[str, ...] = ()
    components: tuple[Component, ...] = ()
    connections: tuple[PortConnection, ...] = ()
    dependencies: tuple[AlfredDependency, ...] = ()
    common_causes: tuple[CommonCause, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(sorted(self.layers)))
        object.__setattr__(
            self, "components",
            tuple(sorted(self.components, key=lambda c: (c.layer, c.name))))
        object.__setattr__(
            self, "connections",
            tuple(sorted(self.connections, key=lambda c: (
                c.from_component, c.from_port, c.to_component, c.to_port))))
        object.__setattr__(
            self, "dependencies",
            tuple(sorted(self.dependencies, key=lambda d: (d.dependent, d.provider))))
        # Alias pairs are stored in star form (smallest member first), so any
        # pair set describing the same groups compares and serialises equal.
        groups = _alias_groups(self.common_causes)
        pairs = [CommonCause(members[0], other)
                 for members in groups.values() for other in members[1:]]
        pairs.sort(key=lambda cc: (cc.a.component, cc.a.event, cc.b.component, cc.b.event))
        object.__setattr__(self, "common_causes", tuple(pairs))

    def has_component(self, name: str) -> bool:
        return any(c.name == name for c in self.components)

    def component(self, name: str) -> Component:
        for comp in self.components:
            if comp.name == name:
                return comp
        raise ModelError(f"unknown component '{name}'")

    def layer_components(self, layer: str) -> tuple[Component, ...]:
        return tuple(c for c in self.components if c.layer == layer)

    def connection_into(self, component: str, port: str) -> PortConnection | None:
        """The connection feeding an in-port, if any."""
        for conn in self.connections:
            if conn.to_component == component and conn.to_port == port:
                return conn
        return None

    def providers_of(self, component: str) -> tuple[str, ...]:
        """Direct failure-dependency providers, in canonical order."""
        return tuple(d.provider for d in self.dependencies if d.dependent == component)

    def identity_map(self) -> dict[tuple[str, str], str]:
        """Map (component, event) to its event identity.

        The default identity is the owner-qualified name; common-cause
        aliases collapse a group to its lexicographically smallest member.
        """
        ident = {(c.name, e.name): f"{c.name}.{e.name}"
                 for c in self.components if c.cft
                 for e in c.cft.events}
        for cc in self.common_causes:
            key = (cc.b.component, cc.b.event)
            if key in ident:
                ident[key] = cc.a.render()
        return ident

    def event_identity(self, component: str, event: str) -> str:
        try:
            return self.identity_map()[(component, event)]
        except KeyError:
            raise ModelError(f"unknown event '{component}.{event}'") from None


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Finding:
    """One validation result with a stable diagnostic code."""

    severity: Severity
    code: str
    element: str
    message: str

    def render(self) -> str:
        return f"{self.severity.value}[{self.code}] {self.element}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors()

    def errors(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity is Severity.ERROR)

    def warnings(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity is Severity.WARNING)

    def render_lines(self) -> tuple[str, ...]:
        return tuple(f.render() for f in self.findings)


def _leftover_cycle_members(nodes, edges) -> tuple[str, ...]:
    """Kahn's algorithm; returns the sorted nodes stuck on a cycle."""
    out = {n: set() for n in nodes}
    indeg = {n: 0 for n in nodes}
    for a, b in edges:
        if a in out and b in indeg and b not in out[a]:
            out[a].add(b)
            indeg[b] += 1
    ready = sorted(n for n in nodes if indeg[n] == 0)
    done = 0
    while ready:
        n = ready.pop()
        done += 1
        for m in sorted(out[n]):
            indeg[m] -= 1
            if indeg[m] == 0:
                ready.append(m)
        ready.sort()
    if done == len(set(nodes)):
        return ()
    return tuple(sorted(n for n in indeg if indeg[n] > 0))


def _check_name(add, kind: str, name: str, element: str) -> None:
    if not is_identifier(name):
        add(Severity.ERROR, "bad-identifier", element,
            f"{kind} name {name!r} is not a legal identifier")


def _validate_cft(comp: Component, add) -> None:
    cft = comp.cft
    bare: dict[str, str] = {}
    for event in cft.events:
        _check_name(add, "event", event.name, f"{comp.name}.{event.name}")
        if event.name in bare:
            add(Severity.ERROR, "duplicate-node", f"{comp.name}.{event.name}",
                f"name already used by a {bare[event.name]}")
        bare[event.name] = "basic event"
    for gate in cft.gates:
        _check_name(add, "gate", gate.name, f"{comp.name}.{gate.name}")
        if gate.name in bare:
            add(Severity.ERROR, "duplicate-node", f"{comp.name}.{gate.name}",
                f"name already used by a {bare[gate.name]}")
        bare[gate.name] = "gate"

    seen_in: set[tuple[str, str | None]] = set()
    for ifm in cft.input_fms:
        element = f"{comp.name}.{ifm.name}" + (f"@{ifm.port}" if ifm.port else "")
        _check_name(add, "input failure mode", ifm.name, element)
        if (ifm.name, ifm.port) in seen_in:
            add(Severity.ERROR, "duplicate-failure-mode", element,
                "input failure mode declared twice")
        seen_in.add((ifm.name, ifm.port))
        if ifm.port is None:
            if ifm.name in bare:
                add(Severity.ERROR, "duplicate-node", f"{comp.name}.{ifm.name}",
                    f"name already used by a {bare[ifm.name]}")
            bare[ifm.name] = "port-less input failure mode"
        elif ifm.port in comp.out_ports:
            add(Severity.ERROR, "wrong-port-direction", element,
                f"input failure mode bound to out-port '{ifm.port}'")
        elif ifm.port not in comp.in_ports:
            add(Severity.ERROR, "unknown-port", element,
                f"port '{ifm.port}' is not declared")

    seen_out: set[tuple[str, str | None]] = set()
    for ofm in cft.output_fms:
        element = f"{comp.name}.{ofm.name}" + (f"@{ofm.port}" if ofm.port else "")
        _check_name(add, "output failure mode", ofm.name, element)
        if (ofm.name, ofm.port) in seen_out:
            add(Severity.ERROR, "duplicate-failure-mode", element,
                "output failure mode declared twice")
        seen_out.add((ofm.name, ofm.port))
        if ofm.port is not None:
            if ofm.port in comp.in_ports:
                add(Severity.ERROR, "wrong-port-direction", element,
                    f"output failure mode bound to in-port '{ofm.port}'")
            elif ofm.port not in comp.out_ports:
                add(Severity.ERROR, "unknown-port", element,
                    f"port '{ofm.port}' is not declared")

    for gate in cft.gates:
        element = f"{comp.name}.{gate.name}"
        if gate.kind is GateKind.NOT and len(gate.inputs) != 1:
            add(Severity.ERROR, "gate-arity", element,
                f"NOT takes exactly 1 input, got {len(gate.inputs)}")
        elif not gate.inputs:
            add(Severity.ERROR, "gate-arity", element,
                f"{gate.kind.value} needs at least 1 input")
        for ref in gate.inputs:
            if cft.resolve(ref) is None:
                add(Severity.ERROR, "unknown-node-ref", element,
                    f"input '{ref.render()}' does not resolve")
    for ofm in cft.output_fms:
        element = f"{comp.name}.{ofm.name}" + (f"@{ofm.port}" if ofm.port else "")
        if cft.resolve(ofm.driver) is None:
            add(Severity.ERROR, "unknown-node-ref", element,
                f"driver '{ofm.driver.render()}' does not resolve")

    gate_edges = []
    gate_names = [g.name for g in cft.gates]
    for gate in cft.gates:
        for ref in gate.inputs:
            target = cft.resolve(ref)
            if isinstance(target, Gate):
                gate_edges.append((gate.name, target.name))
    cyclic = _leftover_cycle_members(gate_names, gate_edges)
    if cyclic:
        add(Severity.ERROR, "cft-cycle", comp.name,
            "gates form a cycle: " + ", ".join(cyclic))


def validate(model: ArchitectureModel) -> ValidationReport:
    """Check every structural invariant; never raises.

    Findings come out in a deterministic order: model-level checks first,
    then per-component checks in canonical component order, connections,
    dependencies, common causes, and finally warnings.
    """
    findings: list[Finding] = []

    def add(severity: Severity, code: str, element: str, message: str) -> None:
        findings.append(Finding(severity, code, element, message))

    if not model.layers:
        add(Severity.ERROR, "no-layers", "model", "no layers declared")
    if not model.components:
        add(Severity.ERROR, "no-components", "model", "no components declared")

    seen_layers: set[str] = set()
    for layer in model.layers:
        _check_name(add, "layer", layer, layer)
        if layer in seen_layers:
            add(Severity.ERROR, "duplicate-layer", layer, "layer declared twice")
        seen_layers.add(layer)

    seen_comps: set[str] = set()
    for comp in model.components:
        _check_name(add, "component", comp.name, comp.name)
        if comp.name in seen_comps:
            add(Severity.ERROR, "duplicate-component", comp.name,
                "component declared twice")
        seen_comps.add(comp.name)
        if comp.layer not in seen_layers:
            add(Severity.ERROR, "unknown-layer", comp.name,
                f"layer '{comp.layer}' is not declared")
        counts = Counter(comp.in_ports) + Counter(comp.out_ports)
        for port in sorted(counts):
            _check_name(add, "port", port, f"{comp.name}.{port}")
            if counts[port] > 1:
                add(Severity.ERROR, "port-collision", f"{comp.name}.{port}",
                    "port name used more than once")
        if comp.cft is not None:
            _validate_cft(comp, add)

    seen_conns: set[tuple[str, str, str, str]] = set()
    incoming: Counter = Counter()
    for conn in model.connections:
        element = conn.render()
        for end, port, ports_ok, ports_wrong, side in (
                (conn.from_component, conn.from_port, "out_ports", "in_ports", "source"),
                (conn.to_component, conn.to_port, "in_ports", "out_ports", "target")):
            if not model.has_component(end):
                add(Severity.ERROR, "unknown-component", element,
                    f"{side} component '{end}' is not declared")
                continue
            comp = model.component(end)
            if port in getattr(comp, ports_ok):
                continue
            if port in getattr(comp, ports_wrong):
                add(Severity.ERROR, "wrong-port-direction", element,
                    f"{side} port '{end}.{port}' has the wrong direction")
            else:
                add(Severity.ERROR, "unknown-port", element,
                    f"{side} port '{end}.{port}' is not declared")
        if conn.from_component == conn.to_component:
            add(Severity.ERROR, "self-connection", element,
                "connection endpoints are on the same component")
        key = (conn.from_component, conn.from_port, conn.to_component, conn.to_port)
        if key in seen_conns:
            add(Severity.ERROR, "duplicate-connection", element,
                "connection declared twice")
        seen_conns.add(key)
        incoming[(conn.to_component, conn.to_port)] += 1
    for (comp_name, port), count in sorted(incoming.items()):
        if count > 1:
            add(Severity.ERROR, "inport-multiple-connections", f"{comp_name}.{port}",
                f"in-port has {count} incoming connections")

    seen_deps: set[tuple[str, str]] = set()
    for dep in model.dependencies:
        element = dep.render()
        for end in (dep.dependent, dep.provider):
            if not model.has_component(end):
                add(Severity.ERROR, "unknown-component", element,
                    f"component '{end}' is not declared")
        if dep.dependent == dep.provider:
            add(Severity.ERROR, "self-dependency", element,
                "component depends on itself")
        key = (dep.dependent, dep.provider)
        if key in seen_deps:
            add(Severity.ERROR, "duplicate-dependency", element,
                "dependency declared twice")
        seen_deps.add(key)
    comp_names = [c.name for c in model.components]
    dep_edges = [(d.dependent, d.provider) for d in model.dependencies
                 if d.dependent != d.provider]
    cyclic = _leftover_cycle_members(comp_names, dep_edges)
    if cyclic:
        add(Severity.ERROR, "dependency-cycle", "model",
            "components in dependency cycle: " + ", ".join(cyclic))

    for cc in model.common_causes:
        for ref in (cc.a, cc.b):
            if not model.has_component(ref.component):
                add(Severity.ERROR, "unknown-event", ref.render(),
                    f"component '{ref.component}' is not declared")
                continue
            cft = model.component(ref.component).cft
            if cft is None or cft.event(ref.event) is None:
                add(Severity.ERROR, "unknown-event", ref.render(),
                    "event is not declared")

    connected = {(c.to_component, c.to_port) for c in model.connections}
    for comp in model.components:
        for port in comp.in_ports:
            if (comp.name, port) not in connected:
                add(Severity.WARNING, "unconnected-in-port", f"{comp.name}.{port}",
                    "in-port has no incoming connection")
    for provider in sorted({d.provider for d in model.dependencies}):
        if model.has_component(provider) and model.component(provider).cft is None:
            add(Severity.WARNING, "provider-no-cft", provider,
                "dependency provider has no fault tree")

    return ValidationReport(tuple(findings))


def dependency_closure(model: ArchitectureModel, component: str) -> tuple[Component, ...]:
    """Direct providers of *component*, in canonical order.

    Deliberately not transitive: a provider's own failure sources flow in
    through its fault tree when the model is woven and synthesised.
    """
    comp = model.component(component)
    return tuple(model.component(name) for name in model.providers_of(comp.name))
