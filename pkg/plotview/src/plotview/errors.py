"""Error type for figure-spec and input-file problems."""


class SpecError(Exception):
    """Raised for unusable figure specs or inputs (missing files,
    missing columns, malformed grids)."""
