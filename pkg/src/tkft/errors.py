"""Exception hierarchy shared by every stage of the pipeline."""


class TKFTError(Exception):
    """Base class for all errors raised by this package."""


class MalformedInput(TKFTError):
    """Input that does not parse or violates a structural invariant."""


class ConstructionError(TKFTError):
    """An object could not be built from otherwise well-formed parts."""


class DecodeError(TKFTError):
    """A binary word is not the image of any encoded configuration."""


class NotInCantorImage(TKFTError):
    """A point has no finite {0,2} ternary expansion in some coordinate."""


class DomainGapError(TKFTError):
    """A point lies outside every source block of a block map."""


class SkeletonIntegrityError(TKFTError):
    """No tube of a bordism skeleton accepts the current point."""


class Refused(TKFTError):
    """A precondition failed; ``certificate`` carries the witness."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate
