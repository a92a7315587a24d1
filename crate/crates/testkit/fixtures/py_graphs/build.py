from graphs import Graph
from graphs.metrics import density, Stats
import graphs.search
import graphs.paths as p


def sample():
    g = Graph()
    g.add_edge(1, 2)
    g.add_edge(2, 3)
    return g


g = sample()
print(density(g), Stats().scaled(g))
print(graphs.search.dfs(g, 1), p.shortest(g, 1, 3), p.nothing)
print(graphs.absent.thing)
