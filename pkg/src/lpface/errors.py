"""Exception hierarchy shared by all lpface modules."""


class LpFaceError(Exception):
    """Base class for every error raised by lpface."""


class InvalidInputError(LpFaceError, ValueError):
    pass


class DecodeError(LpFaceError, ValueError):
    """A PGM stream could not be decoded.

    ``offset`` is the byte position at which decoding failed.
    """

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class DegenerateInputError(InvalidInputError):
    pass


class DomainError(InvalidInputError):
    pass


class DegenerateTrainingSetError(InvalidInputError):
    pass


class TrainingDivergedError(LpFaceError, ArithmeticError):
    def __init__(self, epoch, message="training diverged"):
        super().__init__(f"{message} at epoch {epoch}")
        self.epoch = epoch


class IngestionError(LpFaceError):
    def __init__(self, message, path):
        super().__init__(f"{message}: {path}")
        self.path = path


class InvalidSplitError(InvalidInputError):
    pass


class PersistenceError(LpFaceError):
    pass


class VersionMismatchError(PersistenceError):
    pass


class ChecksumError(PersistenceError):
    pass


class MalformedContainerError(PersistenceError):
    pass
