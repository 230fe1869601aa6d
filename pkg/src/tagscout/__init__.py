"""tagscout: a workbench that turns analyst descriptions of street-level
photographs into suggested road tags via a chat-model backend, and scores
the suggestions against current and historical map tags."""

__version__ = "0.1.0"
