"""Exception hierarchy shared by every gaugeloc module."""


class GaugelocError(Exception):
    """Base class for all domain errors.

    ``context`` holds the structured details (offending cell, axis, slice)
    so the report layer can render them without parsing the message.
    """

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.context = context


# --- exact linear algebra ---


class NotASubspace(GaugelocError):
    pass


class NotInSpan(GaugelocError):
    pass


class TorsionDetected(GaugelocError):
    pass


# --- complexes and cochains ---


class BadSpec(GaugelocError):
    pass


class DegreeMismatch(GaugelocError):
    pass


class ComplexMismatch(GaugelocError):
    pass


class SupportLeak(GaugelocError):
    pass


class BadProfile(GaugelocError):
    pass


# --- propagators ---


class NonHyperbolic(GaugelocError):
    pass


class MarginViolation(GaugelocError):
    pass


class ShadowOverflow(GaugelocError):
    pass


class ShadowsIntersect(GaugelocError):
    pass


class WindowTooThin(GaugelocError):
    pass


class BadDegree(GaugelocError):
    """A degree outside the operation's range; Maxwell observables need 1 <= k <= m - 1."""


# --- Weyl algebra ---


class GroupMismatch(GaugelocError):
    pass


class NotPresymplectic(GaugelocError):
    pass


# --- scenarios ---


class ScenarioError(GaugelocError):
    """Scenario input problems; the CLI exits with status 2 on these."""


class ParseError(ScenarioError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}", line=line, column=column)
        self.line = line
        self.column = column


class ValidationError(ScenarioError):
    pass
