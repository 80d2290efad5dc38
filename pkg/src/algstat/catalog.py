"""Built-in named graphs and models so the paper's sessions are one-liners,
plus the seeded small-tree collection used by the database demo."""

from __future__ import annotations

from .errors import ParseError
from .gaussmodels import GaussianModel, gaussian_graphical_model
from .graphcore import DIRECTED, UNDIRECTED, graph_from_edges, labeling
from .persist import Collection
from .phylomodels import (
    general_markov_model,
    jukes_cantor_model,
    kimura2_model,
    kimura3_model,
)


def _cycle4():
    return graph_from_edges(UNDIRECTED, [[1, 2], [1, 4], [2, 3], [3, 4]])


def _colored_cycle4():
    lab = labeling(
        "color",
        {(1, 4): "Green", (2, 3): "Green", (3, 4): "Blue", (1, 2): "Blue"},
        {1: "Red", 2: "Red", 3: "Yellow", 4: "Yellow"},
    )
    return _cycle4(), lab


NAMED_GRAPHS = {
    "cycle4": _cycle4,
    "cycle5": lambda: graph_from_edges(
        UNDIRECTED, [[1, 2], [2, 3], [3, 4], [4, 5], [1, 5]]
    ),
    "path3": lambda: graph_from_edges(UNDIRECTED, [[1, 2], [2, 3]]),
    "star3": lambda: graph_from_edges(DIRECTED, [[4, 1], [4, 2], [4, 3]]),
    "star4": lambda: graph_from_edges(DIRECTED, [[5, 1], [5, 2], [5, 3], [5, 4]]),
    "sunlet3": lambda: graph_from_edges(
        DIRECTED, [[4, 1], [5, 2], [6, 3], [5, 4], [6, 4], [5, 6]]
    ),
    "sunlet4": lambda: graph_from_edges(
        DIRECTED, [[5, 1], [6, 5], [7, 6], [7, 8], [8, 5], [6, 2], [7, 3], [8, 4]]
    ),
    "chain3": lambda: graph_from_edges(DIRECTED, [[1, 2], [2, 3]]),
    "dag-sec3": lambda: graph_from_edges(
        DIRECTED,
        [[1, 3], [1, 4], [2, 3], [2, 4], [4, 5], [1, 6], [2, 6], [3, 6], [4, 6], [5, 6]],
    ),
}


def named_graph(name: str):
    try:
        return NAMED_GRAPHS[name]()
    except KeyError:
        raise ParseError(
            f"unknown graph {name!r}; choose from {sorted(NAMED_GRAPHS)}"
        ) from None


MODEL_BUILDERS = {
    "cycle4": lambda: gaussian_graphical_model(_cycle4()),
    "colored-cycle4": lambda: gaussian_graphical_model(*_colored_cycle4()),
    "dag-sec3": lambda: gaussian_graphical_model(named_graph("dag-sec3")),
    "jc-star3": lambda: jukes_cantor_model(named_graph("star3")),
    "jc-sunlet3": lambda: jukes_cantor_model(named_graph("sunlet3")),
    "k2-star3": lambda: kimura2_model(named_graph("star3")),
    "k3-star3": lambda: kimura3_model(named_graph("star3")),
    "k3-sunlet4": lambda: kimura3_model(named_graph("sunlet4")),
    "gm-star3": lambda: general_markov_model(named_graph("star3")),
}


def named_model(name: str):
    try:
        return MODEL_BUILDERS[name]()
    except KeyError:
        raise ParseError(
            f"unknown model {name!r}; choose from {sorted(MODEL_BUILDERS)}"
        ) from None


# small JC tree models mirroring the database demo ("n-0-k-JC" naming)
_SMALL_TREES = {
    "3-0-0-JC": [[4, 1], [4, 2], [4, 3]],
    "4-0-0-JC": [[5, 1], [5, 2], [5, 3], [5, 4]],
    "4-0-1-JC": [[5, 1], [5, 2], [5, 6], [6, 3], [6, 4]],
    "5-0-0-JC": [[6, 1], [6, 2], [6, 3], [6, 4], [6, 5]],
    "5-0-1-JC": [[6, 1], [6, 2], [6, 7], [7, 3], [7, 8], [8, 4], [8, 5]],
    "5-0-2-JC": [[6, 7], [6, 8], [7, 1], [7, 2], [8, 3], [8, 4], [8, 5]],
}


def seed_small_tree_models(path) -> Collection:
    """Create the demo collection of six Jukes-Cantor tree models."""
    coll = Collection(path)
    for name, edges in sorted(_SMALL_TREES.items()):
        model = jukes_cantor_model(graph_from_edges(DIRECTED, edges))
        coll.insert(name, model)
    return coll
