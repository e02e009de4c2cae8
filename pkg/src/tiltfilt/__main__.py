import sys

from .toolcli import main

sys.exit(main())
