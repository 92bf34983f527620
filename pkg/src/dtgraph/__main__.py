import sys

from dtgraph.cli import main

sys.exit(main())
