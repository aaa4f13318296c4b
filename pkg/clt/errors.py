"""
Exception hierarchy for the cross length transfer toolkit.

Library code raises these; only the CLI maps them to exit codes.
"""

from typing import Any, Dict, Optional


class CltError(Exception):
    """Base exception for all toolkit errors"""
    pass


class ContractViolation(CltError, ValueError):
    """Raised when an operation is called outside its preconditions"""
    pass


class ConfigError(CltError):
    """Raised when a configuration key or value fails validation"""
    pass


class CorpusFormatError(CltError):
    """Raised when a corpus file line cannot be parsed"""

    def __init__(self, message: str, path: str = None, line_number: int = None):
        self.path = path
        self.line_number = line_number
        location = f"{path}:{line_number}: " if path and line_number else ""
        super().__init__(f"{location}{message}")


class EmbeddingFormatError(CorpusFormatError):
    """Raised when a pretrained embedding line has the wrong shape or bad values"""
    pass


class CheckpointFormatError(CltError):
    """Raised when a checkpoint file is truncated, foreign, or does not match the model"""
    pass


class NonFiniteError(CltError, FloatingPointError):
    """Raised when a NaN or infinity reaches a parameter, gradient, or loss"""

    def __init__(self, message: str, name: str = None):
        self.name = name
        super().__init__(message)


class TrainingDivergedError(CltError):
    """Raised when the training loss becomes non-finite; carries the last good parameters"""

    def __init__(self, message: str, last_good: Optional[Dict[str, Any]] = None, epoch: int = None):
        self.last_good = last_good
        self.epoch = epoch
        super().__init__(message)
