#!/usr/bin/env python3
"""
Volterra LDP - Ponto de Entrada Alternativo

Atalho para a CLI:

    python -m src.main kernel-check --config bundled:kernel_fbm

equivalente a `volterra-ldp ...` ou `python -m src.cli ...`.

Ver também:
    - src/cli.py      : subcomandos e manifesto
    - configs/        : configurações de smoke embutidas
"""

import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
