from components.analysis import AnalysisOptions, analyze
from components.dot import export_dot, render_dot, write_dot
from components.sct import CallGraph
from tests.conftest import FIXTURES


def _edges(text: str):
    return [line for line in text.splitlines() if " -> " in line]


def test_pre_closure_graph(filter_report):
    text = render_dot(filter_report.call_graph, "pre_closure")
    assert text.startswith("digraph pre_closure {\n  node [shape=box];\n")
    for node in ("El", "plus", "app", "len_fil", "len_fil_aux", "fil", "fil_aux"):
        assert f'  "{node}";' in text
    edges = _edges(text)
    assert len(edges) == 14
    assert '  "El" -> "El" [label="A,B [[-1]]"];' in edges
    assert '  "plus" -> "plus" [label="C [[-1, inf], [inf, 0]]"];' in edges
    assert "dashed" not in text


def test_every_pair_labels_an_edge(filter_report):
    text = render_dot(filter_report.call_graph, "pre_closure")
    labels = set()
    for line in _edges(text):
        labels.update(line.split('label="')[1].split(" ")[0].split(","))
    assert labels == {pair.label for pair in filter_report.dependency_pairs}


def test_closure_edges_are_dashed(filter_report):
    text = export_dot(filter_report.call_graph, filter_report.closed_graph)
    pre, post = text.split("\ndigraph post_closure {")
    assert len(_edges(post)) > len(_edges(pre))
    assert '"len_fil_aux" -> "len_fil_aux"' in post
    loops = [line for line in _edges(post) if line.startswith('  "len_fil_aux" -> "len_fil_aux"')]
    assert loops and all(line.endswith(", style=dashed];") for line in loops)


def test_nodes_follow_declarations():
    report = analyze(FIXTURES / "length_filter.sct", AnalysisOptions(timing=False))
    text = render_dot(report.call_graph, "pre_closure")
    nodes = [line.strip() for line in text.splitlines() if line.strip().endswith('";')]
    assert nodes == ['"El";', '"plus";', '"app";', '"len_fil";', '"len_fil_aux";']


def test_empty_graph():
    assert render_dot(CallGraph([], {}, {}), "pre_closure") == (
        "digraph pre_closure {\n  node [shape=box];\n}\n"
    )


def test_write_dot(tmp_path, filter_report):
    path = tmp_path / "graph.dot"
    write_dot(path, filter_report.call_graph, None)
    assert path.read_text(encoding="utf-8") == render_dot(filter_report.call_graph, "pre_closure")


def test_quoting():
    graph = CallGraph(['a"b'], {}, {})
    assert '  "a\\"b";' in render_dot(graph, "g")
