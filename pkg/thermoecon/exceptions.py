"""Exceptions raised by thermoecon."""
from typing import Optional


class ThermoEconException(Exception):
    """Base exception for thermoecon errors."""


class SeriesError(ThermoEconException):
    """An annual series is malformed or an operation on it is undefined."""


class UnitError(ThermoEconException):
    """A unit tag is invalid, or a physical quantity is out of range."""


class ModelError(ThermoEconException):
    """A thermodynamic model equation was given invalid inputs."""


class ReconstructionError(ThermoEconException):
    """A historical dataset could not be built."""


class AnalysisError(ThermoEconException):
    """A fit or falsification test could not be computed."""


class IngestError(ThermoEconException):
    """Reading or writing an external file failed."""

    def __init__(
        self, message: str, path: Optional[str] = None, line: Optional[int] = None
    ) -> None:
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")
