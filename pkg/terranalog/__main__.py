import sys

from terranalog.cli import main

sys.exit(main())
