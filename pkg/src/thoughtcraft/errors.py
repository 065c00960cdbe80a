"""Exception types shared across the package."""


class ThoughtcraftError(Exception):
    """Base class for all package errors."""


# --- catalog loading ---

class FileMissingError(ThoughtcraftError):
    pass


class MalformedRecordError(ThoughtcraftError):
    pass


class DanglingReferenceError(ThoughtcraftError):
    pass


class DependencyCycleError(ThoughtcraftError):
    pass


class NoBaseError(ThoughtcraftError):
    pass


class MultipleBasesError(ThoughtcraftError):
    pass


class UnknownIdError(ThoughtcraftError):
    pass


# --- simulation ---

class DifficultyOutOfRangeError(ThoughtcraftError):
    pass


class EpisodeFinishedError(ThoughtcraftError):
    pass


class UnknownFeatureError(ThoughtcraftError):
    pass


class InvalidZError(ThoughtcraftError):
    pass


# --- policy / trainer ---

class DimensionMismatchError(ThoughtcraftError):
    pass


class EmptyMaskError(ThoughtcraftError):
    pass


class InvalidDistributionError(ThoughtcraftError):
    pass


class LengthMismatchError(ThoughtcraftError):
    pass


class EmptyBufferError(ThoughtcraftError):
    pass


class NonFiniteGradientError(ThoughtcraftError):
    pass


# --- curriculum / transfer ---

class InvalidCountsError(ThoughtcraftError):
    pass


class SchemaMismatchError(ThoughtcraftError):
    pass


class UnknownActionError(ThoughtcraftError):
    pass


class InvalidCountError(ThoughtcraftError):
    pass


# --- experiment harness ---

class ConfigInvalidError(ThoughtcraftError):
    pass


class EnvironmentFailureError(ThoughtcraftError):
    pass
