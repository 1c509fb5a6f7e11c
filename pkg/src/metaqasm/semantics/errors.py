class InterpreterError(RuntimeError):
    """Raised for conditions a well-typed program cannot reach."""


class AliasingError(InterpreterError):
    pass


class ResourceLimitError(InterpreterError):
    pass


class BranchLimitError(ResourceLimitError):
    pass
