"""Exception types shared across the package."""


class CpdGeoError(Exception):
    """Base class for all library errors."""


class DomainError(CpdGeoError):
    """Evaluation requested outside the usable parameter domain."""


class DegenerateCurveError(CpdGeoError):
    """Curve derivative norm fell below the regularity threshold."""


class ImmersionDegeneracyError(CpdGeoError):
    """First fundamental form is (numerically) singular."""


class FocalSetError(CpdGeoError):
    """Profile construction hit the focal set of the base curve."""


class TransversalityError(CpdGeoError):
    """Ambient field is (numerically) normal to the hypersurface."""


class ZeroFieldError(CpdGeoError):
    """Ambient field vanishes at the query point."""


class CutLocusError(CpdGeoError):
    """Nearest-point projection is not single-valued at the query point."""


class OutsideTubeError(CpdGeoError):
    """Query point lies outside the declared tubular neighborhood."""


class SingularIntegrandError(CpdGeoError):
    """Quadrature integrand 1/b became singular on the requested range."""


class InconsistentDataError(CpdGeoError):
    """Derived quantities violate an exact relation beyond tolerance."""


class MeshExportError(CpdGeoError):
    """Mesh grid incomplete and holes were not permitted."""


class ExpressionError(CpdGeoError):
    """Malformed expression text."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class SceneError(CpdGeoError):
    """Invalid scene configuration."""

    def __init__(self, message, field=None):
        if field:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field
