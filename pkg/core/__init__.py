# Tetrad Core Module
# Contains the domain model, geometry, symmetry checks, homographic orbits, config and metrics
