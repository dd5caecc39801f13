"""Wrapper for Pylint"""

import os
import pathlib
import subprocess
import sys

ROOT_PATH = pathlib.Path(__file__).parent.parent.expanduser().resolve()
PYPKG_PATH = ROOT_PATH / "python"
PYLINTRC_PATH = PYPKG_PATH / ".pylintrc"


def main() -> None:
    """Run Pylint on the given files, or on the whole package and tests."""

    # sys.argv[1:]: List of source files to check
    targets = sys.argv[1:] or [str(PYPKG_PATH / "invobs"), str(ROOT_PATH / "tests" / "python")]
    env = os.environ.copy()
    env["PYTHONPATH"] = os.pathsep.join(filter(None, [str(PYPKG_PATH), env.get("PYTHONPATH")]))
    subprocess.run(
        ["pylint", "-rn", "-sn", "--rcfile", str(PYLINTRC_PATH)] + targets,
        check=True,
        env=env,
    )


if __name__ == "__main__":
    main()
