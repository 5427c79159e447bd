"""Exception hierarchy.

``InputError`` covers malformed files and inconsistent arguments (CLI exit
code 1).  ``Refusal`` and its subclasses mark inputs that are well formed
but outside the mathematically supported scope (CLI exit code 2).
"""


class ToolkitError(Exception):
    pass


class InputError(ToolkitError):
    pass


class FieldMismatchError(InputError):
    pass


class Refusal(ToolkitError):
    pass


class ZeroTensorError(Refusal):
    pass


class NotConciseError(Refusal):
    pass


class UnsupportedFormatError(Refusal):
    pass


class CharacteristicError(Refusal):
    pass


class NotNilpotentError(Refusal):
    pass


class NotCentroidMemberError(Refusal):
    pass


class InternalCheckError(ToolkitError):
    """An invariant the theory guarantees failed to hold; indicates a bug
    or an input that silently violated a precondition."""
