import sys

from cs3.cli import main

sys.exit(main())
