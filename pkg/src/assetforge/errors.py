"""Exception types shared across the package."""


class ValidationError(ValueError):
    """A domain object violates one of its invariants.

    ``field`` names the offending field so callers (and humans reading
    logs) can locate the problem without re-parsing the message.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class ManifestParseError(ValueError):
    """Manifest text could not be decoded into a record."""


class MeshParseError(ValueError):
    """Mesh bytes could not be decoded into a triangle mesh."""


class DegenerateMeshError(ValueError):
    """Mesh lacks the geometric substance required by an operation."""


class TransportError(RuntimeError):
    """A remote annotation call failed at the transport or schema level.

    Distinct from a *negative* annotation result (e.g. a quality gate
    rejection), which is a normal domain outcome.
    """


class PlacementInfeasibleError(RuntimeError):
    """Rejection sampling could not place an asset within the attempt budget."""

    def __init__(self, asset_id: str, attempts: int):
        self.asset_id = asset_id
        self.attempts = attempts
        super().__init__(
            f"could not place asset {asset_id!r} after {attempts} attempts"
        )


class StatsIntegrityError(ValueError):
    """Recorded pipeline counts contradict each other."""
