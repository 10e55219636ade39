"""Network-slice service catalog, ordering and fulfillment OSS."""

__version__ = "0.1.0"
