import sys

from skylink.cli import main

sys.exit(main())
