import sys

from sando.cli import main

sys.exit(main())
