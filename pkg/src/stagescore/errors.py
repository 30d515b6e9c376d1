"""Exception types shared across the package."""


class StageScoreError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(StageScoreError):
    """Invalid configuration values or constructor arguments."""


class DataError(StageScoreError):
    """Dataset content violates its invariants."""


class DataFormatError(DataError):
    """Manifest is malformed, incomplete, or has an unknown format version."""


class ShapeMismatchError(DataError):
    """Declared shapes disagree with the actual payload or tensor."""


class SamplingError(DataError):
    """No valid training pair can be sampled from the split."""


class ExemplarUnavailableError(DataError):
    """No exemplar videos exist for the requested class."""


class InvalidLabelError(DataError):
    """Stage or transition labels violate the labeling rules."""


class DegenerateInputError(StageScoreError):
    """Metric input admits no well-defined value (e.g. constant score list)."""


class CheckpointError(StageScoreError):
    """Checkpoint archive cannot be read or applied."""


class CheckpointIntegrityError(CheckpointError):
    """Archive payload is truncated or inconsistent with its header."""


class CheckpointVersionError(CheckpointError):
    """Archive was written by an unsupported format version."""


class NumericError(StageScoreError):
    """Non-finite values encountered during training or inference."""
