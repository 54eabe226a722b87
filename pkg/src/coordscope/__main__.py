import sys

from coordscope.cli import main

sys.exit(main())
