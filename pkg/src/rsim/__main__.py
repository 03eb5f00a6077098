import sys

from rsim.cli import main

sys.exit(main())
