import sys
from VIF.cli import main

sys.exit(main())
