"""Exception hierarchy shared across the pipeline."""


class CardiomlError(Exception):
    """Base class for all package errors."""


class SchemaError(CardiomlError):
    """Fatal structural problem with an input file (e.g. missing header columns)."""


class DomainError(CardiomlError):
    """An operation was called with inputs outside its declared domain."""


class ConfigurationError(CardiomlError):
    """Invalid run configuration or hyperparameters; raised before any compute."""


class PreprocessError(CardiomlError):
    """Fatal preprocessing failure (zero-variance column, class too small, ...)."""


class TuningError(CardiomlError):
    """A hyperparameter search could not proceed (fold failure, oversized grid, ...)."""


class StageError(CardiomlError):
    """Pipeline stage failure; carries the stage name."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
