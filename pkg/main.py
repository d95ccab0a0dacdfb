"""
Ponto de entrada da linha de comando.

Uso local:
    python main.py list
    python main.py sweep --max-n 8 --trials 50 --seed 7 --report report.txt
"""

import logging
import sys

from app.cli import main as cli_main
from app.config import LOG_FORMAT, LOG_LEVEL


def main() -> int:
    logging.basicConfig(level=getattr(logging, LOG_LEVEL.upper(), logging.INFO), format=LOG_FORMAT)
    return cli_main(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
