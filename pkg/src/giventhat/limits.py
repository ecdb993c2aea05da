"""Resource caps, cooperative deadlines and the exceptions they raise.

Defaults can be overridden through environment variables:

``GIVENTHAT_NODE_CAP``
    maximum number of BDD nodes per manager (default ``2**22``)
``GIVENTHAT_STATE_CAP``
    maximum number of states built by the LTL translator (default ``2**16``)
``GIVENTHAT_COMPLEMENT_CAP``
    maximum number of intermediate states in generic complementation
    (default ``10**5``)
``GIVENTHAT_TIMEOUT_MS``
    default per-problem timeout used by the bench harness (default 10000)
"""

import os
import threading
import time
from contextlib import contextmanager


class ResourceExceeded(RuntimeError):
    """A hard cap (nodes, states, marks) was hit."""


class CapExceeded(ResourceExceeded):
    """A soft, caller-chosen state budget was exhausted."""


class DeadlineExceeded(RuntimeError):
    """The cooperative deadline installed by :func:`deadline` expired."""


def _env_int(name, default):
    value = os.environ.get(name)
    if value is None or value.strip() == "":
        return default
    return int(value)


def default_node_cap():
    return _env_int("GIVENTHAT_NODE_CAP", 2**22)


def default_state_cap():
    return _env_int("GIVENTHAT_STATE_CAP", 2**16)


def default_complement_cap():
    return _env_int("GIVENTHAT_COMPLEMENT_CAP", 10**5)


def default_timeout_ms():
    return _env_int("GIVENTHAT_TIMEOUT_MS", 10000)


MAX_MARKS = 32

_local = threading.local()


@contextmanager
def deadline(ms):
    """Install a cooperative deadline ``ms`` milliseconds from now.

    Long-running loops call :func:`check_deadline`, which raises
    :class:`DeadlineExceeded` once the deadline has passed.  ``ms=None``
    disables the deadline for the enclosed block.
    """
    previous = getattr(_local, "deadline", None)
    _local.deadline = None if ms is None else time.monotonic() + ms / 1000.0
    try:
        yield
    finally:
        _local.deadline = previous


def check_deadline():
    limit = getattr(_local, "deadline", None)
    if limit is not None and time.monotonic() > limit:
        raise DeadlineExceeded("deadline exceeded")
