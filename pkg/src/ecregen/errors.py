"""Exception types shared across the package."""


class CodeError(Exception):
    """Base class for every error raised by ecregen."""


class InvalidParameter(CodeError, ValueError):
    pass


class DimensionError(CodeError, ValueError):
    pass


class SingularMatrix(CodeError, ArithmeticError):
    pass


class DecodeFailure(CodeError):
    """Raised by the Reed-Solomon decoder when no codeword is found within its radius."""


class ReconstructionFailure(CodeError):
    """Progressive data reconstruction ran out of rounds or nodes.

    ``accessed`` lists the node indices that were fetched before giving up.
    """

    def __init__(self, msg, accessed=()):
        super().__init__(msg)
        self.accessed = list(accessed)


class InsufficientHelpers(CodeError):
    pass


class RegenerationFailure(CodeError):
    pass


class IntegrityFailure(CodeError):
    pass


class ShardFormatError(CodeError, ValueError):
    pass
