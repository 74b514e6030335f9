import sys

from boolprop.cli import main

sys.exit(main())
