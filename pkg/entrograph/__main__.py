"""Run the entrograph command line: python -m entrograph <command> ..."""
import sys
from entrograph.main import main


if __name__ == "__main__":
    sys.exit(main())
