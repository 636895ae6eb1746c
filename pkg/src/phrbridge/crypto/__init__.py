"""Cryptographic core: pairing facade, the HPRE scheme, hybrid layer and wire formats."""
