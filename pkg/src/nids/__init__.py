"""Neural-network intrusion detection over CICIDS2017-style flow records."""

__version__ = "0.1.0"
