"""Hausdorff Voronoi diagrams of non-crossing point clusters, built by randomized insertion."""
from .cluster import Cluster, Family, validate_family
from .incremental import construct

__all__ = ["Cluster", "Family", "construct", "validate_family"]
