"""Exceptions shared across the package."""


class SchurLabError(Exception):
    pass


class BudgetExceeded(SchurLabError):
    """A search or enumeration ran past its configured work budget."""
