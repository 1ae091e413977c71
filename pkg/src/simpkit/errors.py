"""Exception hierarchy shared across the toolkit.

Two broad classes matter at the boundaries: bad input (caller can fix it,
CLI exit code 1) and runtime/backend failure (environment problem, exit
code 2). Everything raised on purpose derives from SimpkitError so the
CLI can map it without enumerating modules.
"""

from __future__ import annotations


class SimpkitError(Exception):
    """Base class for all deliberate toolkit errors."""


class InputError(SimpkitError):
    """Invalid user input: bad file, bad flag value, violated precondition."""


class BackendError(SimpkitError):
    """Runtime failure in an external dependency: network, subprocess, endpoint."""


class PipelineError(BackendError):
    """A generation job died mid-pipeline. Records which stage failed."""

    def __init__(self, message: str, stage_index: int):
        super().__init__(message)
        self.stage_index = stage_index


class NotFoundError(InputError):
    """A referenced record does not exist (HTTP 404 at the service layer)."""


class AuthorizationError(InputError):
    """The actor is not allowed to touch this record (HTTP 403)."""


class ConflictError(InputError):
    """The write collides with newer state (HTTP 409); re-read and retry."""
