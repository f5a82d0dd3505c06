import sys

from vhoeval.cli import main

sys.exit(main())
