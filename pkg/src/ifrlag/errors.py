"""Exception hierarchy. The CLI maps each family to a distinct exit code."""


class DataError(Exception):
    """Invalid input data or configuration (exit code 2)."""


class LengthMismatch(DataError):
    pass


class NegativeValue(DataError):
    pass


class CasesExceedTests(DataError):
    pass


class PopulationExceeded(DataError):
    pass


class DomainError(DataError):
    """Argument outside the mathematical domain of an operation."""


class ConfigError(DataError):
    pass


class IngestError(DataError):
    pass


class MissingColumn(IngestError):
    pass


class UnparseableRow(IngestError):
    pass


class GapUnrepairable(IngestError):
    pass


class PolicyViolation(IngestError):
    pass


class CalibrationError(Exception):
    """Anchor calibration cannot be satisfied (exit code 3)."""


class InfeasibleAnchorLow(CalibrationError):
    pass


class InfeasibleAnchorHigh(CalibrationError):
    pass


class DegenerateSeries(CalibrationError):
    pass


class CalibrationFailed(CalibrationError):
    pass


class FitError(Exception):
    """Least-squares fit cannot be performed (exit code 4)."""


class ZeroShiftedSeries(FitError):
    pass


class ZeroInfectionSeries(FitError):
    pass


class ZeroInfectionWindow(FitError):
    pass
