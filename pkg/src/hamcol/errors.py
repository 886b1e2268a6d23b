"""Exception types shared across the package."""


class InvalidParameter(ValueError):
    """A parameter is outside its documented domain."""


class InvalidInput(ValueError):
    """An input object violates a precondition (bad cycle, missing data, ...)."""


class InvalidMerge(InvalidInput):
    """Two-arc exchange requested for vertices of the same cycle."""


class InvalidRotation(InvalidInput):
    """Rotation indices violate 2 <= k < l <= len(path)."""
