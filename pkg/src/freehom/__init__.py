"""Free homotopy classes of closed orbits after Dehn surgery on geodesic flows."""

__version__ = "0.1.0"
