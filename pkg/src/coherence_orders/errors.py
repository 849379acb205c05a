"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`CoherenceError`, which is itself a :class:`ValueError`, so callers
can catch either.
"""


class CoherenceError(ValueError):
    pass


class NotHermitian(CoherenceError):
    pass


class NoConvergence(CoherenceError, ArithmeticError):
    pass


class ShapeMismatch(CoherenceError):
    pass


class DimensionNotPowerOfTwo(CoherenceError):
    pass


class OrderOutOfRange(CoherenceError):
    pass


class NegativeTime(CoherenceError):
    pass


class TopologyMismatch(CoherenceError):
    pass


class EmptyGrid(CoherenceError):
    pass


class InvalidState(CoherenceError):
    pass


class ZeroTau(CoherenceError):
    pass


class ParamOutOfRange(CoherenceError):
    pass


class UnknownExample(CoherenceError):
    pass


class ParseError(CoherenceError):
    pass


class GoldenMismatch(CoherenceError):
    def __init__(self, cells):
        self.cells = list(cells)
        lines = "\n".join(f"  {c}" for c in self.cells[:50])
        more = "" if len(self.cells) <= 50 else f"\n  ... {len(self.cells) - 50} more"
        super().__init__(f"{len(self.cells)} golden cell(s) drifted:\n{lines}{more}")
