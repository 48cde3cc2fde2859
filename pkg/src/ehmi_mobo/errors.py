"""Exception hierarchy shared by all engine modules."""


class EhmiMoboError(Exception):
    """Base class for every error raised by this package."""


# --- design space ---

class WrongArity(EhmiMoboError):
    """Design vector does not have exactly 9 components."""


class NotFinite(EhmiMoboError):
    """A numeric input is NaN or infinite."""


class OutOfRange(EhmiMoboError):
    """A value lies outside its declared bounds."""


# --- objectives ---

class ScaleViolation(EhmiMoboError):
    """A questionnaire item is outside its scale bounds."""


# --- surrogate ---

class InsufficientData(EhmiMoboError):
    """Not enough observations to fit a surrogate."""


class NumericalFailure(EhmiMoboError):
    """A linear-algebra or sampling step failed beyond recovery."""


# --- pareto ---

class EmptyInput(EhmiMoboError):
    """An operation that needs at least one point received none."""


class ReferenceViolation(EhmiMoboError):
    """A front point does not dominate the reference point."""


# --- optimizer / session ---

class ConfigInvalid(EhmiMoboError):
    """Session or acquisition configuration fails validation."""


class SessionFinished(EhmiMoboError):
    """A rating was submitted to a session that already finished."""


# --- analysis ---

class DegenerateSample(EhmiMoboError):
    """Both samples have zero pooled variance."""


class DegenerateColumn(EhmiMoboError):
    """A correlation column is constant."""


class EmptyGroup(EhmiMoboError):
    """A grouped statistic was requested for an empty group."""


class ParseError(EhmiMoboError):
    """A dataset file could not be parsed."""


class SchemaError(EhmiMoboError):
    """A dataset file does not match the expected schema."""
