"""Classical simulator for seeded quantum-walk sampling of edge superpositions."""

from qwseed.constants import Constants, load_constants
from qwseed.errors import CapacityError, InputError, ParseError
from qwseed.graph import Graph, QueryLedger, build_family

__all__ = [
    "CapacityError",
    "Constants",
    "Graph",
    "InputError",
    "ParseError",
    "QueryLedger",
    "build_family",
    "load_constants",
]

__version__ = "0.1.0"
