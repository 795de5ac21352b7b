"""Exception types raised by the library and mapped to exit codes by the CLI."""
from dataclasses import dataclass


class AdmissibleError(Exception):
    """Base class for every error raised by this project."""


class InputError(AdmissibleError):
    """Problems with user-supplied data; exit code 1."""


@dataclass(frozen=True)
class Violation:
    """One failed validation rule, e.g. ('NonEffectiveK', 'leaf')."""
    kind: str
    subject: str = ''
    detail: str = ''

    def __str__(self):
        text = self.kind
        if self.subject:
            text += f"({self.subject})"
        if self.detail:
            text += f": {self.detail}"
        return text


class ValidationError(InputError):
    """Raised with the complete list of violated graph invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__('; '.join(str(v) for v in self.violations))

    @property
    def kinds(self):
        return [v.kind for v in self.violations]


class ParseError(InputError):
    def __init__(self, message, location=''):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class ConfigError(InputError):
    pass


class InvalidSpec(InputError):
    pass


class UnknownCommand(InputError):
    pass


class BadFlag(InputError):
    pass


class GenusZero(InputError):
    pass


class GenusTooSmall(InputError):
    pass


class InvalidSideGenus(InputError):
    pass


class GenusMismatch(InputError):
    pass


class NotTwoEdgeConnected(InputError):
    pass


class InvalidForGenusOne(InputError):
    pass


class PoleAt(InputError):
    def __init__(self, s):
        self.s = s
        super().__init__(f"Gamma factor has a pole at s={s}")


class NotTriangulationLinear(InputError):
    pass


class LevelMismatch(InputError):
    pass


class HypothesisViolated(InputError):
    pass


class InvariantAssertionError(AdmissibleError):
    """An identity that must hold exactly did not; exit code 2."""
