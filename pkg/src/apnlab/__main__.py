import sys

from apnlab.cli import main

sys.exit(main())
