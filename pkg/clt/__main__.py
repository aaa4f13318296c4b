import sys

from clt.cli.main import main

sys.exit(main())
