"""Graph invariants, product complexes, triple pairings and root numbers."""
