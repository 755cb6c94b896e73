"""Main entry point - wrapper for starmod.main."""

from starmod.main import main

if __name__ == "__main__":
    main()
