import sys

from stirling_lab.cli import main

sys.exit(main())
