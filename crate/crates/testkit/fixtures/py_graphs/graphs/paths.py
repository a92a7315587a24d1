from graphs.search import bfs as breadth
from graphs.cycle_a import ping


def shortest(graph, a, b):
    order = breadth(graph, a)
    return order.index(b) if b in order else -1


def longest(graph, a):
    def shortest(x):
        return x
    return shortest(len(breadth(graph, a)))


def loop():
    return ping()
