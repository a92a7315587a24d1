from .core import Graph
