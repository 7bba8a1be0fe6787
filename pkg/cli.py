import sys

from src.svarmsh.pipeline.main import main

if __name__ == "__main__":
    sys.exit(main())
