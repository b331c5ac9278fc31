import sys

from abcpart.cli import main

sys.exit(main())
