"""
Application Entry Point
=======================

Runs the ising2mm command line, e.g.

    python run.py free-energy --tau 0.3 --t -0.02
"""

from app.main import run

if __name__ == "__main__":
    run()
