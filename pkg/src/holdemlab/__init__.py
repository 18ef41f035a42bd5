"""holdemlab: Texas Hold'em hand histories, prompt datasets, simulation,
metrics and a live advisor service."""

__version__ = "0.1.0"
