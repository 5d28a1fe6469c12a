import sys

from oddsymp.cli import main

sys.exit(main())
