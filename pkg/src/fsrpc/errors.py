"""Exception types shared across the package."""


class FsrpcError(Exception):
    """Base class for domain errors raised by fsrpc."""


class WidthMismatchError(FsrpcError, ValueError):
    def __init__(self, expected, got):
        self.expected = expected
        self.got = got
        super().__init__(f"width mismatch: counter is {expected} bits, state is {got} bits")


class NotOnCycleError(FsrpcError, ValueError):
    pass


class SpecError(FsrpcError, ValueError):
    """A counter or FSR definition breaks its structural rules."""


class DescriptionError(FsrpcError, ValueError):
    """Syntax or semantic error in a processor description or program text."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class MappingError(FsrpcError, ValueError):
    """A program cannot be placed under the given processor description."""


class FetchError(FsrpcError, LookupError):
    def __init__(self, address, step_index):
        self.address = address
        self.step_index = step_index
        super().__init__(f"fetch from unwritten address {address:#x} at step {step_index}")
