"""Maximum bounded-convex-curvature subset of a curvilinear polygon."""

from .boundary import Region, load_and_validate
from .engine import RunStats, run
from .geom import ArcGeom, Circle, Point, Tolerance
from .io import GeometryDocument, ResultDocument, region_to_result

__version__ = "0.1.0"

__all__ = [
    "ArcGeom", "Circle", "GeometryDocument", "Point", "Region",
    "ResultDocument", "RunStats", "Tolerance", "load_and_validate",
    "region_to_result", "run", "__version__",
]
