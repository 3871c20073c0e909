"""Exception types shared across the engine.

Every error that crosses the API boundary maps onto one of the codes in
`ERROR_CODES`; in-process callers catch the concrete classes.
"""


class MotionLensError(Exception):
    """Base class for all engine errors."""

    code = "validation"


class ParseError(MotionLensError):
    """A motion file could not be parsed. Carries an optional line number."""

    code = "parse_error"

    def __init__(self, message, line=None):
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.line = line


class IncompatibleSkeletons(MotionLensError):
    """Clips in one session do not share a skeleton."""

    code = "incompatible_skeletons"

    def __init__(self, message, missing=(), extra=()):
        super().__init__(message)
        self.missing = sorted(missing)
        self.extra = sorted(extra)


class EmptySession(MotionLensError):
    """An operation that needs at least one clip got none."""

    code = "validation"


class FrameOutOfRange(MotionLensError):
    """A frame index fell outside a clip's active range."""

    code = "frame_out_of_range"


class ObjectDegenerate(MotionLensError):
    """A scene object's transform is not invertible."""

    code = "validation"

    def __init__(self, object_id):
        super().__init__(f"scene object {object_id!r} has a degenerate transform")
        self.object_id = object_id


class NotFound(MotionLensError):
    """Lookup by id or name failed."""

    code = "not_found"


class ValidationError(MotionLensError):
    """A value violated a structural or range constraint."""

    code = "validation"


ERROR_CODES = (
    "parse_error",
    "incompatible_skeletons",
    "not_found",
    "validation",
    "frame_out_of_range",
)
