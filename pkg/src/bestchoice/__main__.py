import sys

from bestchoice.cli import main

sys.exit(main())
