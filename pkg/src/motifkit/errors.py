"""Exception types raised by the toolkit.

Everything inherits from MotifkitError so CLI code can map any data or
validation problem to a single exit code.
"""


class MotifkitError(Exception):
    """Base class for all toolkit errors."""


class CorpusError(MotifkitError):
    """Document, standoff-annotation, or layer-cache problem."""


class BratFormatError(CorpusError):
    """A .ann file does not parse or does not match its document."""


class LayerFormatError(CorpusError):
    """A layer file contains a malformed record."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        loc = ""
        if path is not None:
            loc = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(loc + message)
        self.path = path
        self.line = line


class LayerValidationError(CorpusError):
    """A loaded layer bundle violates a structural invariant."""


class RuleError(MotifkitError):
    """The matcher rule file is invalid."""


class FeatureError(MotifkitError):
    """Feature extraction cannot proceed (unknown motif, missing tokens)."""


class SchemaMismatchError(MotifkitError):
    """Feature vector and model disagree on the feature schema."""


class TrainingError(MotifkitError):
    """Training preconditions violated (empty or unlabeled data)."""


class ModelFormatError(MotifkitError):
    """A serialized model cannot be read back."""


class MetricsError(MotifkitError):
    """Evaluation or agreement input is inconsistent."""


class DegenerateAgreementError(MetricsError):
    """Fleiss' kappa is undefined: all ratings fall in one category."""


class PipelineError(MotifkitError):
    """A pipeline stage cannot run or a required artifact is missing."""
