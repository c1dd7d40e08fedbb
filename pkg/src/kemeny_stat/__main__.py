"""`python -m kemeny_stat` dispatch."""

from .cli import entry

if __name__ == "__main__":
    entry()
