"""Roundtrip spanners, emulators and approximate girth for weighted digraphs."""

from .emulator import EmulatorResult, ParameterError, build_emulator, emulator_distances
from .generators import generate
from .girth4 import GirthConfig, GirthEstimate, RetryLimitExceeded, approx_girth_4
from .graph import (
    INF,
    GraphError,
    ParseError,
    SccDecomposition,
    WeightedDigraph,
    parse_graph,
    read_graph,
    scc_decompose,
    serialize_graph,
    write_graph,
)
from .regularize import RegularizedGraph, regularize
from .spanner import SpannerResult, build_3_spanner
from .sssp import dijkstra, exact_girth, exact_roundtrip_apsp

__version__ = "0.1.0"

__all__ = [
    "INF",
    "EmulatorResult",
    "GirthConfig",
    "GirthEstimate",
    "GraphError",
    "ParameterError",
    "ParseError",
    "RegularizedGraph",
    "RetryLimitExceeded",
    "SccDecomposition",
    "SpannerResult",
    "WeightedDigraph",
    "approx_girth_4",
    "build_3_spanner",
    "build_emulator",
    "dijkstra",
    "emulator_distances",
    "exact_girth",
    "exact_roundtrip_apsp",
    "generate",
    "parse_graph",
    "read_graph",
    "regularize",
    "scc_decompose",
    "serialize_graph",
    "write_graph",
]
