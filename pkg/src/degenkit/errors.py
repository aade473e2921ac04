"""Exception types shared across the package.

``InputError`` covers malformed files, violated preconditions, and invalid
degeneration data; the CLI maps it to exit code 2.  ``FalsificationError`` is
reserved for internal cross-checks that the theory says can never fail: if
one fires, either the input encodes something impossible or the mathematics
has been falsified, and it must surface loudly (CLI exit code 1).
"""

from __future__ import annotations


class DegenkitError(Exception):
    pass


class InputError(DegenkitError, ValueError):
    pass


class FalsificationError(DegenkitError, RuntimeError):
    pass
