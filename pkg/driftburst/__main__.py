import sys

from driftburst.cli.main import main

sys.exit(main())
