"""Exception hierarchy shared by the solver modules."""


class HubflowError(Exception):
    """Base class for all library errors."""


class StructuralError(HubflowError, ValueError):
    """Instance data references something that does not exist or cannot work."""


class ValidationError(HubflowError, ValueError):
    """A value violates a declared invariant (negative travel time, bad window, ...)."""


class ParseError(ValidationError):
    """A file could not be decoded into a domain object.

    ``field`` names the offending key path and ``line`` the source line when
    the JSON decoder can report one.
    """

    def __init__(self, message, field=None, line=None):
        where = []
        if field is not None:
            where.append(f"field {field!r}")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.field = field
        self.line = line


class InfeasibleError(HubflowError):
    """No feasible solution exists.

    ``certificate`` carries whatever witness the raising solver can offer,
    e.g. the node set of a deficient cut for min-cost flow.
    """

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class SizeGuardError(HubflowError):
    """Input too large for an exhaustive method."""


class RepairFailure(HubflowError):
    """Earliest-start scheduling of a route overshoots a time window."""

    def __init__(self, message, route=None, task=None):
        super().__init__(message)
        self.route = route
        self.task = task


class SolveFailure(HubflowError):
    """A heuristic ended without a feasible plan (fleet exhausted, time limit, ...)."""
