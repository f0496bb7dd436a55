"""Exception types and the pole sentinel."""


class QJensenError(Exception):
    pass


class DomainError(QJensenError, ValueError):
    pass


class AmbiguousPoint(QJensenError):
    """Point is simultaneously a zero and a pole of a PQL factorization."""

    def __init__(self, point, zero_indices, pole_indices):
        self.point = point
        self.zero_indices = tuple(zero_indices)
        self.pole_indices = tuple(pole_indices)
        super().__init__(
            f"{point} is a zero of factors {self.zero_indices} "
            f"and a pole of factors {self.pole_indices}"
        )


class DegenerateTransform(QJensenError, ValueError):
    pass


class ClearanceError(QJensenError):
    pass


class SingularNode(QJensenError):
    pass


class PreconditionFailed(QJensenError, ValueError):
    pass


class GuardFailed(QJensenError):
    pass


class BoundaryContact(QJensenError):
    def __init__(self, entries, rho):
        self.entries = list(entries)
        self.rho = rho
        super().__init__(f"{len(self.entries)} zero/pole entries lie on |x| = {rho}")


class OriginSingular(QJensenError):
    def __init__(self, order):
        self.order = order
        super().__init__(f"f has a zero/pole of order {order} at the origin")


class ExtrapolationUnstable(QJensenError):
    pass


class SpecError(QJensenError, ValueError):
    """Malformed function description; ``path`` locates the offending field."""

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class _Pole:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "POLE"

    def __reduce__(self):
        return (_Pole, ())


#: Returned by scalar evaluators at points of the pole set.
POLE = _Pole()
