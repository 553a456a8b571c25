"""Simulator for orbital-angular-momentum photon entanglement experiments."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
from ._core import run_cli as _run_cli


def main(argv=None):
    """Entry point for the ``oamsim`` console script."""
    import sys

    code, out, err = _run_cli(list(sys.argv[1:] if argv is None else argv))
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code
