import sys

from kzero.cli import main

sys.exit(main())
