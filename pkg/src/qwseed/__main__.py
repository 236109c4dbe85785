import sys

from qwseed.cli import main

sys.exit(main())
