"""PHRBridge: cross-chain PHR sharing via IBE-to-CLC proxy re-encryption."""

__version__ = "0.1.0"
