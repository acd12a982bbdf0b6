"""Exception types shared across the package."""


class PlaybcError(Exception):
    """Base class for all playbc errors."""


class ManifestError(PlaybcError):
    """Dataset manifest missing or unreadable."""


class IntegrityError(PlaybcError):
    """Manifest and on-disk contents disagree."""


class SchemaError(PlaybcError):
    """A file does not match its declared layout (lengths, columns, ...)."""


class ValidationError(PlaybcError):
    """Well-formed data carrying invalid values (NaN/Inf, out of range)."""


class TransferError(PlaybcError):
    """Weight transfer failed: missing layer key or shape mismatch."""


class CheckpointError(PlaybcError):
    """Checkpoint file corrupt, truncated, or of an unsupported version."""


class ConfigError(PlaybcError):
    """Invalid or inconsistent run configuration."""


class GenerationError(PlaybcError):
    """Synthetic data generation failed (e.g. scripted expert never converged)."""


class ConflictError(PlaybcError):
    """Two runs report different values for the same results-table cell."""
