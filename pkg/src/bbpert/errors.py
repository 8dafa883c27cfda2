"""Exception hierarchy; every error contract in the package raises a BBError."""


class BBError(Exception):
    pass


class RootIsolationError(BBError):
    pass


class SingularSystemError(BBError):
    pass


class SolverError(BBError):
    """A perturbation order could not be constructed."""

    def __init__(self, message: str, order: int | None = None):
        self.order = order
        if order is not None:
            message = f"order {order}: {message}"
        super().__init__(message)


class PadeError(BBError):
    pass


class OracleNotConverged(BBError):
    pass
