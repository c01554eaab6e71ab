import sys

from workfringe.cli import main

sys.exit(main())
