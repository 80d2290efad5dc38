"""Exception hierarchy shared across the package.

Every domain error derives from AlgStatError so the CLI can map any of
them to a single nonzero exit code while argparse keeps its own.
"""


class AlgStatError(Exception):
    """Base class for all domain errors raised by this package."""


# ring / polynomial layer
class DuplicateName(AlgStatError):
    pass


class RingMismatch(AlgStatError):
    pass


class ParseError(AlgStatError):
    pass


# groebner layer
class ZeroSaturand(AlgStatError):
    pass


class DegreeBudgetExceeded(AlgStatError):
    pass


# graph layer
class SelfLoop(AlgStatError):
    pass


class DuplicateEdge(AlgStatError):
    pass


class OverlappingSets(AlgStatError):
    pass


class CyclicGraph(AlgStatError):
    pass


class AdjacentPair(AlgStatError):
    pass


class MultipleRoots(AlgStatError):
    pass


class NotLevelOne(AlgStatError):
    pass


class UnsupportedGraphKind(AlgStatError):
    pass


# statistics layer
class IndexOutOfRange(AlgStatError):
    pass


class MissingLabel(AlgStatError):
    pass


class UnsupportedAlgorithm(AlgStatError):
    pass


class InvalidTemplate(AlgStatError):
    pass


class NoSuchEdge(AlgStatError):
    pass


class NotHybridEdge(AlgStatError):
    pass


class NotGroupBased(AlgStatError):
    pass


class SymmetryViolation(AlgStatError):
    pass


class ZeroImage(AlgStatError):
    pass


# persistence layer
class UnknownType(AlgStatError):
    pass


class SchemaMismatch(AlgStatError):
    pass
