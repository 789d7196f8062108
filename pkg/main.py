"""
IonGate - Script de Execução
============================
Roda a CLI do simulador de portões de dois íons.
"""

import sys

from dotenv import load_dotenv

# Carrega variáveis de ambiente (IONGATE_*)
load_dotenv()

from iongate import __version__
from iongate.cli import main


def print_header():
    """Mostra header no terminal."""
    print("\n" + "=" * 60, file=sys.stderr)
    print(f"     ⚛️  IonGate {__version__} - Simulador de portões MS", file=sys.stderr)
    print("=" * 60, file=sys.stderr)
    print("  Comandos: run, budget, sweep, fit, validate, calibrate", file=sys.stderr)
    print("=" * 60, file=sys.stderr)


if __name__ == "__main__":
    print_header()
    sys.exit(main())
