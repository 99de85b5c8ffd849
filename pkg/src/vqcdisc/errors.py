"""Exception types shared across modules."""

__all__ = ["CapacityError"]


class CapacityError(ValueError):
    """A request exceeds a documented compute or structural budget.

    Raised e.g. for depths beyond a tree-structured circuit's maximum or for
    qubit counts beyond a dense-matrix budget. The message always names the
    admissible maximum.
    """
