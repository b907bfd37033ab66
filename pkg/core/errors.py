"""
Errors
======

Exception hierarchy shared by the jet engine, the geometry layer, the
catalog and the command-line surface.
"""


class VerificationError(Exception):
    """Base class for every error raised by the verification engine."""


class JetError(VerificationError, ValueError):
    """Base class for jet arithmetic errors."""


class JetMismatchError(JetError):
    """Operands disagree on dimension or order."""


class JetDomainError(JetError):
    """An analytic operation was applied outside its domain."""


class JetOrderError(JetError):
    """A derivative was requested beyond the available jet order."""


class GeometryError(VerificationError, ValueError):
    """Singular or ill-signed metric, or a form of impossible rank."""


class FieldExprSyntaxError(VerificationError, ValueError):
    """Field expression text does not follow the grammar."""

    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        self.line, self.column = _line_column(text, position)
        super().__init__(f"{message} at line {self.line}, column {self.column}")


class FieldExprGuardError(VerificationError, ValueError):
    """A positivity guard is violated somewhere on the sample domain."""


class DataClassError(VerificationError):
    """An identity needs data the selected data class does not provide."""


class UnknownIdentityError(VerificationError, KeyError):
    """Identity id is not present in the registry."""

    def __str__(self) -> str:
        return f"Unknown identity: {self.args[0]}" if self.args else "Unknown identity"


class CatalogError(VerificationError):
    """Catalog entry is malformed or fails its residual oracle."""


class HypothesisError(VerificationError):
    """A probe was requested on data violating the estimate's hypotheses."""


class ConfigError(VerificationError):
    """Run configuration is invalid."""


def _line_column(text: str, position: int) -> tuple[int, int]:
    head = text[:position]
    line = head.count("\n") + 1
    column = position - (head.rfind("\n") + 1) + 1
    return line, column
