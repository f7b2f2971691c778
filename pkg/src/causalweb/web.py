"""Causal webs: the decomposition as a hypergraph, exported to DOT or JSON.

Every driver subset is one hyperedge into the target carrying its pure
mlink normalised by ``W(x | Y)``.  In DOT a single-driver link is a plain
arrow; a link of two or more drivers goes through a junction node that
collects one arrow per member and sends one labelled arrow to the target.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .decomposition import DecompositionResult, members, subset_masks

__all__ = ["NOISE_NODE", "Hyperedge", "CausalWeb", "build_web", "to_dot", "to_json"]

NOISE_NODE = "eta"


@dataclass(frozen=True)
class Hyperedge:
    members: tuple[str, ...]
    strength: float

    @property
    def order(self) -> int:
        return len(self.members)

    @property
    def key(self) -> str:
        return "+".join(self.members)


@dataclass
class CausalWeb:
    target: str
    drivers: list[str]
    edges: list[Hyperedge]
    totals: dict = field(default_factory=dict)
    cs: dict = field(default_factory=dict)
    cs_noise: float = 0.0
    threshold: float = 0.0

    @property
    def nodes(self) -> list[str]:
        return [*self.drivers, self.target, NOISE_NODE]

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "nodes": self.nodes,
            "noise_node": NOISE_NODE,
            "threshold": self.threshold,
            "hyperedges": [{"members": list(e.members), "order": e.order, "strength": e.strength}
                           for e in self.edges],
            "totals": self.totals,
            "cs": self.cs,
            "cs_noise": self.cs_noise,
        }


def build_web(result: DecompositionResult, threshold: float = 0.01) -> CausalWeb:
    """Hyperedges whose ``|normalised pure mlink|`` is at least ``threshold``."""
    labels = result.labels
    # the target may share a name with a driver process; keep node names unique
    target = result.spec.target
    while target in labels or target == NOISE_NODE:
        target += "'"
    edges = []
    for mask in subset_masks(result.n_drivers):
        strength = result.mlinks.pure[mask] / result.w_total
        if abs(strength) >= threshold:
            edges.append(Hyperedge(tuple(labels[i] for i in members(mask)), strength))
    return CausalWeb(target=target, drivers=list(labels), edges=edges,
                     totals=result.totals_by_label(), cs=result.cs_by_label(),
                     cs_noise=result.cs_noise, threshold=threshold)


def _fmt(value, percent):
    return f"{100 * value:.0f}%" if percent else f"{value:.2f}"


def _quote(name):
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(web: CausalWeb, percent: bool = False) -> str:
    """Graphviz DOT text; negative links are dashed."""
    lines = ["digraph causal_web {", "  rankdir=LR;"]
    for d in web.drivers:
        lines.append(f"  {_quote(d)} [shape=ellipse, xlabel={_quote('cs ' + _fmt(web.cs[d], percent))}];")
    lines.append(f"  {_quote(web.target)} [shape=doublecircle];")
    lines.append(f"  {_quote(NOISE_NODE)} [shape=plaintext];")
    lines.append(f"  {_quote(NOISE_NODE)} -> {_quote(web.target)} "
                 f"[label={_quote(_fmt(web.cs_noise, percent))}, style=dotted];")
    for n, edge in enumerate(web.edges):
        style = ", style=dashed" if edge.strength < 0 else ""
        label = _quote(_fmt(edge.strength, percent))
        if edge.order == 1:
            lines.append(f"  {_quote(edge.members[0])} -> {_quote(web.target)} [label={label}{style}];")
            continue
        junction = _quote(f"j{n}:{edge.key}")
        lines.append(f"  {junction} [shape=point, width=0.08];")
        for m in edge.members:
            lines.append(f"  {_quote(m)} -> {junction} [arrowhead=none{style}];")
        lines.append(f"  {junction} -> {_quote(web.target)} [label={label}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(web: CausalWeb) -> str:
    return json.dumps(web.to_dict(), indent=2, allow_nan=False) + "\n"
