"""Deterministic DOT export for multigraphs and their orientations."""

from __future__ import annotations

from .core import Multigraph, Orientation


def _dashed_edge_ids(g: Multigraph) -> set[str]:
    """Light/dummy edges (drawn dashed): zero-to-both edges always; on goods
    graphs with two weight classes, the lighter class too."""
    dashed = {e.id for e in g.edges if e.weight_a == 0 and e.weight_b == 0}
    if all(e.weight_a >= 0 and e.weight_b >= 0 for e in g.edges):
        weights = {e.weight_a for e in g.edges} | {e.weight_b for e in g.edges}
        if len(weights) >= 2:
            light = min(weights)
            dashed |= {e.id for e in g.edges
                       if e.weight_a == light and e.weight_b == light}
    return dashed


def export_dot(g: Multigraph, pi: Orientation | None = None,
               style: str = "paper") -> str:
    """Render the multigraph in DOT: undirected unless an orientation is
    given; with style "paper", heavy edges solid and light/dummy dashed."""
    if style not in ("paper", "plain"):
        raise ValueError("style must be 'paper' or 'plain'")
    assign = None
    if pi is not None:
        problems = pi.validate_for(g)
        if problems:
            raise ValueError(f"orientation invalid for graph: {problems}")
        assign = pi.as_dict()
    dashed = _dashed_edge_ids(g) if style == "paper" else set()
    kind = "digraph" if assign is not None else "graph"
    connector = "->" if assign is not None else "--"
    lines = [f"{kind} {{"]
    for v in range(g.vertex_count):
        lines.append(f"  {v};")
    for e in g.edges:
        attrs = [f'label="{e.id}"']
        if e.id in dashed:
            attrs.append("style=dashed")
        if assign is not None:
            to = assign[e.id]
            frm = e.other(to) if not e.is_self_loop() else e.a
        else:
            frm, to = e.a, e.b
        lines.append(f"  {frm} {connector} {to} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
