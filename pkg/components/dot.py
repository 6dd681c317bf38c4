from pathlib import Path
from typing import List, Optional, Union

from components.sct import CallGraph


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def render_dot(graph: CallGraph, name: str) -> str:
    """Renders the call graph as a DOT digraph.

    Each edge carries the labels of the pairs behind its matrix, matrices that only arise by
    composition are drawn dashed.
    """
    lines = [f"digraph {name} {{", "  node [shape=box];"]
    for node in graph.nodes:
        lines.append(f"  {_quote(node)};")
    for source, target, matrix in graph.sorted_edges():
        labels = graph.pair_labels(source, target, matrix)
        text = f"{','.join(labels)} {matrix}" if labels else str(matrix)
        style = "" if labels else ", style=dashed"
        lines.append(f"  {_quote(source)} -> {_quote(target)} [label={_quote(text)}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(graph: CallGraph, closed: Optional[CallGraph] = None) -> str:
    parts: List[str] = [render_dot(graph, "pre_closure")]
    if closed is not None:
        parts.append(render_dot(closed, "post_closure"))
    return "\n".join(parts)


def write_dot(path: Union[str, Path], graph: CallGraph, closed: Optional[CallGraph]) -> None:
    Path(path).write_text(export_dot(graph, closed), encoding="utf-8")
