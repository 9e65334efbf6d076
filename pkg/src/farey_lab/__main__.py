import sys

from farey_lab.cli import main

sys.exit(main())
