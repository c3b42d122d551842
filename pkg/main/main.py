# Entry point for the shearlet energy experiments
# Basic script used to initialize the tool and run the requested subcommand

from typing import Optional, Sequence
import sys

from tools.tool import Tool


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Main function
    """
    tool = Tool()
    code = tool.run(argv)
    tool.dispose()
    return code


if __name__ == "__main__":
    sys.exit(main())
