"""Exception types shared across the package."""


class MedscmError(Exception):
    """Base class for package-specific errors."""


class DomainError(MedscmError):
    """An argument lies outside its declared domain."""


class ShapeError(MedscmError):
    """The model does not have the graph shape an operation requires."""


class EnumerationSizeError(MedscmError):
    """The exogenous-noise product space exceeds the enumeration cap."""


class DegenerateStratumError(MedscmError):
    """A conditional distribution was requested on a zero-probability stratum."""

    def __init__(self, stratum: str):
        super().__init__(f"degenerate stratum: {stratum}")
        self.stratum = stratum


class ReproductionError(MedscmError):
    """Closed-form and enumerated values disagree beyond tolerance."""


class InternalConsistencyError(MedscmError):
    """An identity that must hold by construction failed; signals a bug."""
