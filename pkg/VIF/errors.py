"""
Exception hierarchy shared by every VIF module. The CLI maps these onto process exit codes
"""
from typing import Optional


class VIFError(Exception):
    """ Base class for all errors raised by VIF """
    exit_code = 1


class ConfigurationError(VIFError, ValueError):
    """ A configuration value is out of its domain. `field` holds the dotted field name """
    exit_code = 2

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f'{field}: {message}')


class DomainError(VIFError, ValueError):
    """ An argument lies outside the domain of the operation """
    exit_code = 2


class ContractViolation(VIFError, AssertionError):
    """ An input does not satisfy a structural pre-condition (e.g. a non-Hermitian matrix) """
    exit_code = 3


class NumericError(VIFError, ArithmeticError):
    """ A numerical procedure failed. `diagnostics` carries whatever the failing routine measured """
    exit_code = 3

    def __init__(self, message: str, diagnostics: Optional[dict] = None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class TopologyError(NumericError):
    """ The vortex winding changed during self-consistency """


class ConvergenceError(NumericError):
    """ Too many members of an ensemble failed to converge """


class StageError(VIFError):
    """ A pipeline stage is missing an artifact produced by an earlier stage """
    exit_code = 3


class ArtifactError(VIFError, OSError):
    """ An artifact could not be read or written """
    exit_code = 4
