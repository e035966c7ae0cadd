"""expsum-lab - run the command-line interface with ``python -m expsum_lab``."""

from expsum_lab.presentation.cli import main

if __name__ == "__main__":
    raise SystemExit(main())
