import sys

from schurlab.cli import main

sys.exit(main())
