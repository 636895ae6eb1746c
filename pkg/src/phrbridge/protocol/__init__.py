"""Cross-chain sharing protocol: entity nodes, messages, gateway and scenario driver."""
