"""Exception types shared across the pipeline.

The CLI maps :class:`ContractError` to exit status 1 and
:class:`EnvironmentError_` to exit status 2.
"""


class SentinelError(Exception):
    """Base class for all errors raised by this package."""


class ContractError(SentinelError, ValueError):
    """A caller violated an operation's precondition."""


class EnvironmentError_(SentinelError, OSError):
    """A file, checkpoint or other external resource is unavailable."""


class SourceLoadError(EnvironmentError_):
    """A source table could not be read."""


class HeaderMismatchError(ContractError):
    def __init__(self, path, missing):
        self.path = str(path)
        self.missing = list(missing)
        super().__init__(f"{self.path}: missing column(s) {', '.join(self.missing)}")


class UnmappedLabelError(ContractError):
    def __init__(self, source_id, values):
        self.source_id = source_id
        self.values = dict(values)
        listed = ", ".join(f"{k}={v!r}" for k, v in self.values.items())
        super().__init__(f"{source_id}: no label rule matches {listed}")


class EmptyTextError(ContractError):
    """Text normalizes to nothing and cannot be classified."""


class ModelLoadError(SentinelError):
    """A persisted model directory is missing, corrupt or incompatible."""

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(message)


class CheckpointNotFoundError(EnvironmentError_):
    pass


class MissingArtifactError(ContractError):
    """An upstream pipeline stage has not been run."""

    def __init__(self, command, path):
        self.command = command
        self.path = str(path)
        super().__init__(f"missing {self.path}; run `sentinel {command}` first")
