import sys

from fearbd.cli import main

sys.exit(main())
