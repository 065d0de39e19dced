"""Exception types shared across the package."""


class Error(Exception):
    """Base class for all lexclass errors."""


class CorpusError(Error):
    """A corpus input file is malformed; the message carries the line number."""


class ModelFormatError(Error):
    """A model file is malformed or inconsistent; the message carries the line number."""


class ZeroProbabilityError(Error):
    """A probability query or EM step hit an event of probability zero.

    Raised for undefined posteriors and conditionals, for observed pairs
    whose joint probability is zero (minus-infinity log-likelihood), and for
    the corresponding training degeneracy.
    """


class EmptyDataError(Error):
    """An operation that needs at least one observation received none."""


class DegenerateClassWarning(UserWarning):
    """A class received zero posterior mass during an EM step."""
