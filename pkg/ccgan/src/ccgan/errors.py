"""Exception types shared across the package."""


class CCGanError(Exception):
    """Base class for everything this package raises on purpose."""


class ConfigError(CCGanError):
    """A training configuration failed validation."""


class DataError(CCGanError):
    """A manifest, image file, or bridge directory is unusable."""


class TrainingDiverged(CCGanError):
    """A loss went non-finite; the run stopped instead of logging garbage."""
