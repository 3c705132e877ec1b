import sys

from hexflow.cli import main

sys.exit(main())
