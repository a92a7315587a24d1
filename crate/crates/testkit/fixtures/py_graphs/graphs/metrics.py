from graphs.core import Graph
from graphs.paths import shortest

counter = 0


def degree(graph, node):
    global counter
    counter = counter + 1
    return len(graph.adj[node])


def density(graph):
    n = len(graph.nodes())
    edges = sum(degree(graph, v) for v in graph.nodes())
    return edges / (n * (n - 1)) if n > 1 else 0.0


class Stats:
    scale = 2

    def scaled(self, graph):
        return scale * density(graph)


def diameter(graph):
    nodes = graph.nodes()
    return max(shortest(graph, a, b) for a in nodes for b in nodes)
