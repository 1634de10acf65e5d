import sys

from bundlediag.cli import main

sys.exit(main())
