from __future__ import annotations

from typing import Dict

import pydot

from .automata import Pda, state_graph

INIT_NODE = "init"


def _quoted(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_pydot(pda: Pda, name: str = "pda") -> pydot.Dot:
    graph = state_graph(pda)
    dot = pydot.Dot(name, graph_type="digraph", rankdir="LR")

    ids: Dict[str, str] = {}
    for n, (state, data) in enumerate(graph.nodes(data=True)):
        ids[state] = f"s{n}"
        shape = "doublecircle" if data["accepting"] else "circle"
        dot.add_node(pydot.Node(ids[state], label=_quoted(state), shape=shape))

    if pda.initial_state in ids:
        dot.add_node(pydot.Node(INIT_NODE, label='""', shape="none", width="0"))
        dot.add_edge(pydot.Edge(INIT_NODE, ids[pda.initial_state]))

    for source, target, data in graph.edges(data=True):
        dot.add_edge(pydot.Edge(ids[source], ids[target], label=_quoted(data["label"])))
    return dot


def to_dot(pda: Pda, name: str = "pda") -> str:
    return to_pydot(pda, name).to_string()


def write_dot(path: str, pda: Pda) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(to_dot(pda))
