"""Exception hierarchy shared by every module."""

from __future__ import annotations


class ListpaintError(Exception):
    """Base class for all errors raised by this package."""


class CapExceeded(ListpaintError):
    """An exact search was asked to run above its configured size cap."""

    def __init__(self, what: str, value: int, cap: int):
        super().__init__(f"{what}={value} exceeds cap {cap}")
        self.what = what
        self.value = value
        self.cap = cap


# -- parsing -----------------------------------------------------------------

class ParseError(ListpaintError):
    """Malformed serialized input; ``offset`` is a byte offset or a 1-based line."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)
        self.offset = offset


class MalformedHeader(ParseError):
    pass


class TruncatedBitVector(ParseError):
    pass


class NonPrintableByte(ParseError):
    pass


class EdgeListError(ParseError):
    """Edge-list failure; ``offset`` holds the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(message, None)
        self.args = (f"{message} (line {line})",)
        self.line = line
        self.offset = line


class SelfLoop(EdgeListError):
    pass


class DuplicateEdge(EdgeListError):
    pass


class SchemaViolation(ListpaintError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class HashMismatch(ListpaintError):
    pass


# -- graph structure ---------------------------------------------------------

class NotBipartite(ListpaintError):
    pass


class DegreeExceeds(ListpaintError):
    pass


class WitnessNotFound(ListpaintError):
    pass


# -- token calculus ----------------------------------------------------------

class IllegalSave(ListpaintError):
    pass


class TokenExhausted(ListpaintError):
    def __init__(self, vertex: int):
        super().__init__(f"vertex {vertex} would drop to zero tokens")
        self.vertex = vertex


class RestrictionViolated(ListpaintError):
    pass


class HypothesisViolated(ListpaintError):
    def __init__(self, vertex: int, message: str):
        super().__init__(f"{message} (vertex {vertex})")
        self.vertex = vertex


class VerificationFailed(ListpaintError):
    pass


class ConstantInput(ListpaintError):
    pass


# -- randomized construction -------------------------------------------------

class MalformedPartition(ListpaintError):
    pass


class ResampleBudgetExceeded(ListpaintError):
    def __init__(self, iterations: int, violated: list):
        super().__init__(f"still {len(violated)} bad events after {iterations} resamples")
        self.iterations = iterations
        self.violated = violated


class Infeasible(ListpaintError):
    def __init__(self, message: str, hall_set: frozenset = frozenset()):
        super().__init__(message)
        self.hall_set = hall_set


class RatioViolated(ListpaintError):
    def __init__(self, m: int, z: int, message: str = ""):
        super().__init__(f"star system round failed at m={m}, z={z}" + (f": {message}" if message else ""))
        self.m = m
        self.z = z


class PipelineFailed(ListpaintError):
    """Construction did not yield a verified scheme; a legitimate outcome off-regime."""

    def __init__(self, phase: str, vertex: int | None, message: str = "", trace=None):
        where = f"phase {phase}" + (f", vertex {vertex}" if vertex is not None else "")
        super().__init__(f"{where}: {message}" if message else where)
        self.phase = phase
        self.vertex = vertex
        self.message = message
        self.trace = trace
