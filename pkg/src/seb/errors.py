"""Exception hierarchy for the solver library."""


class SEBError(Exception):
    """Base class for every error raised by this package."""


class InputError(SEBError):
    """Problem with user-supplied points or arguments."""


class EmptyInputError(InputError):
    pass


class FormatError(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class DimensionError(SEBError, ValueError):
    pass


class PreconditionError(SEBError):
    pass


class ZeroNormError(PreconditionError):
    def __init__(self, index):
        super().__init__(
            f"point {index} has zero norm; apply preprocess_nonzero first"
        )
        self.index = index


class RankConditionError(SEBError):
    """The points are not affinely independent, so no unique equidistant point exists."""


class DegenerateSupportError(SEBError):
    pass


class DiagnosticsError(SEBError):
    pass


class UnboundedKappaError(DiagnosticsError):
    pass


class DegenerateReductionError(SEBError):
    pass
