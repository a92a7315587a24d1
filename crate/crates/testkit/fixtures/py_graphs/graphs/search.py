from .core import neighbours
from . import core


def bfs(graph, start):
    seen = [start]
    queue = [start]
    while queue:
        node = queue.pop(0)
        for nxt in neighbours(graph, node):
            if nxt not in seen:
                seen.append(nxt)
                queue.append(nxt)
    return seen


def dfs(graph, start):
    seen = []

    def visit(node):
        if node in seen:
            return
        seen.append(node)
        for nxt in neighbours(graph, node):
            visit(nxt)

    visit(start)
    return seen


def reachable(graph, a, b):
    return b in bfs(graph, a) and core.neighbours is not None
