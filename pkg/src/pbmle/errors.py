"""Exception hierarchy shared by every module of the package."""


class PBError(Exception):
    """Base class for all errors raised by pbmle."""


class StructuralError(PBError, ValueError):
    """An object refers to projects that do not exist, or is malformed."""


class InfeasibleAllocationError(PBError, ValueError):
    """A budget allocation would exceed the budget limit."""


class EnumerationLimitError(PBError):
    """Brute-force enumeration was requested over too many projects."""


class BranchLimitError(PBError):
    """Exhaustive tie branching explored more states than allowed."""


class UndefinedDistributionError(PBError, ValueError):
    """A noise model is undefined for the given ground truth (zero normaliser)."""


class EmptyProfileError(PBError, ValueError):
    """A rule that needs at least one agent received an empty profile."""
