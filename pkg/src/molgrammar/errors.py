"""Exception hierarchy shared by every subpackage."""


class MolGrammarError(Exception):
    """Base class for all errors raised by molgrammar."""


# molecule layer
class SmilesSyntaxError(MolGrammarError, ValueError):
    pass


class ValenceError(MolGrammarError, ValueError):
    pass


class UnsupportedFeature(MolGrammarError, ValueError):
    pass


class DimensionMismatch(MolGrammarError, ValueError):
    pass


# hypergraph / grammar layer
class InvalidComponent(MolGrammarError, ValueError):
    pass


class NonTerminalPresent(MolGrammarError, ValueError):
    pass


class StaleMatch(MolGrammarError, RuntimeError):
    pass


class BudgetExceeded(MolGrammarError, RuntimeError):
    pass


class DeadEnd(MolGrammarError, RuntimeError):
    pass


class GrammarFormatError(MolGrammarError, ValueError):
    pass


class ReplayError(MolGrammarError, RuntimeError):
    pass


# learning layer
class UnknownEdge(MolGrammarError, KeyError):
    pass


class MetricFailure(MolGrammarError, RuntimeError):
    pass


class EmptyDataset(MolGrammarError, ValueError):
    pass


# metrics layer
class EmptyBatch(MolGrammarError, ValueError):
    pass


class TooFew(MolGrammarError, ValueError):
    pass


class UnknownPattern(MolGrammarError, KeyError):
    pass


class ProcessFailure(MolGrammarError, RuntimeError):
    pass


class ProtocolError(MolGrammarError, RuntimeError):
    pass


class ScorerTimeout(MolGrammarError, TimeoutError):
    pass
