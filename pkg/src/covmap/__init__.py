"""Crowdsourced mobile-signal coverage mapping.

Ingests geotagged RSSI measurements, clusters them per operator into
signal-strength bands, and serves heatmaps plus nearest-stronger-signal
queries over HTTP.
"""

__version__ = "0.1.0"

from .clustering import ClusterModel, fit, predict
from .geo import GeoPoint, find_nearest_stronger, haversine_distance
from .measurements import Measurement, validate_measurement

__all__ = [
    "ClusterModel",
    "GeoPoint",
    "Measurement",
    "__version__",
    "find_nearest_stronger",
    "fit",
    "haversine_distance",
    "predict",
    "validate_measurement",
]
