"""Half-integral weight Poincare series, L-values and non-vanishing certificates."""
