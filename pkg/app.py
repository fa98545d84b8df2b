"""
Command-line entry point for the cohesive group agency toolkit.

Usage:
    python app.py networks --agents 1,2 --class c0
    python app.py valid "E{1,2} p -> p" --class c0
    python app.py demo piano
"""

from src.cli import main


if __name__ == "__main__":
    main()
