"""Exception hierarchy. Every geometric validation failure is a ``ValueError``."""


class GeometryError(ValueError):
    pass


class InvalidDimension(GeometryError):
    pass


class DegenerateTriangle(GeometryError):
    pass


class NumericalDegeneracy(GeometryError):
    pass


class DegenerateCone(GeometryError):
    pass


class NotSalient(GeometryError):
    pass


class RedundantGenerator(GeometryError):
    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"generator {index} lies in the cone of the others")


class DegenerateSimplex(GeometryError):
    pass


class InvalidLattice(GeometryError):
    pass


class FaceNotFound(GeometryError):
    pass


class ExcessiveDegeneracy(RuntimeError):
    """Too many samples fell within the classification margin."""


class InputError(ValueError):
    """Malformed scene input; the message names the offending location."""
