"""ballarea: free-boundary minimal surfaces in the unit ball."""

__version__ = "0.1.0"
