import sys

from dynah.cli import main

sys.exit(main())
