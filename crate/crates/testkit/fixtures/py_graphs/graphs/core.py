class Graph:
    def __init__(self):
        self.adj = {}

    def add_edge(self, a, b):
        self.adj.setdefault(a, []).append(b)
        self.adj.setdefault(b, [])

    def nodes(self):
        return sorted(self.adj)


def neighbours(graph, node):
    return graph.adj.get(node, [])
