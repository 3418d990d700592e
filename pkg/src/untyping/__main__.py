import sys

from untyping.cli import main

sys.exit(main())
