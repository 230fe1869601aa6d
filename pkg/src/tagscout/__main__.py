import sys

from tagscout.cli import main

sys.exit(main())
