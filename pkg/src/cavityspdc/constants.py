"""Physical constants used across the package."""

# Vacuum speed of light, m/s (exact by SI definition).
C_M_PER_S = 299792458.0
