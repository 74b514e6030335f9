"""Black-box access to a Boolean function with query accounting."""

from __future__ import annotations

import numpy as np

from boolprop.boolfn import BooleanFunction


class OracleHandle:
    """Wraps a function and counts every query made through it.

    ``quantum_queries`` grows by one per phase-oracle application (including
    those inside an inverse preparation); ``classical_queries`` by one per
    point evaluation.  Counters only ever increase.  A handle is not meant to
    be shared between concurrently running testers.
    """

    __slots__ = ("function", "quantum_queries", "classical_queries")

    def __init__(self, function: BooleanFunction):
        if not isinstance(function, BooleanFunction):
            raise TypeError(f"expected BooleanFunction, got {type(function).__name__}")
        self.function = function
        self.quantum_queries = 0
        self.classical_queries = 0

    @property
    def n(self) -> int:
        return self.function.n

    def query(self, x: int) -> int:
        self.classical_queries += 1
        return int(self.function.table[x])

    def query_many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs)
        self.classical_queries += int(xs.size)
        return self.function.table[xs]

    def phase_signs(self) -> np.ndarray:
        """Diagonal of the phase oracle; charges one quantum query."""
        self.quantum_queries += 1
        return self.function.signs

    @property
    def total_queries(self) -> int:
        return self.quantum_queries + self.classical_queries

    def __repr__(self):
        return (
            f"OracleHandle({self.function!r}, quantum={self.quantum_queries}, "
            f"classical={self.classical_queries})"
        )


def as_handle(f) -> OracleHandle:
    return f if isinstance(f, OracleHandle) else OracleHandle(f)
