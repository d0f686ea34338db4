"""obstruction_lab: a 2-D visibility laboratory for discrete obstacle sets.

Exact occlusion arcs and their unions, explicit obstacle constructions
(slow spiral, punctured lattice), hidden-point certificates and searches,
the dark-forest constant cascade with boundary classification, and
integer-scaled tree realization; plus a deterministic batch CLI.
"""

from .arcs import ArcSet, arc_union, blocked_arc
from .constructions import (PunctureParams, PunctureResult, SpiralParams,
                            generate_window, lattice_enumeration,
                            puncture_construct, spiral_points, spiral_window,
                            verify_puncture_conditions, verify_window)
from .errors import (BadDirection, BadIndex, BadParam, DegenerateObstacle,
                     DomainError, EmptySet, EpsilonTooLarge,
                     HorizonExceedsWindow, MissingMetadata, MissingTable,
                     MissingSeparation, NoAdmissibleRegion, NotMultiple,
                     ObstructionLabError, ParseError, RealizationFailed,
                     SearchOverflow, SubdivisionNotFound, VersionError)
from .forest import (BoundaryClass, CensusResult, DJConstants, ForestConstants,
                     Subdivision, classify_boundary_point, dj_constants,
                     dj_find_subdivision, forest_constants, frontal_census,
                     next_multiple)
from .geometry import (Direction, Point, Ray, Segment, dist_point_ray,
                       dist_point_segment, normalize_angle)
from .scene import (Scene, canonical_json, load_scene, save_scene,
                    scene_roundtrip)
from .svgplot import export_svg, render_svg
from .trees import (BucketGrid, EdgeMatch, ExceptionalReport, PlaneTree,
                    Realization, exceptional_set, realize_edge, realize_tree)
from .visibility import (Certificate, SumAndBound, VisibilityReport,
                         hidden_search, inverse_norm_sum_and_bound,
                         t_blocked_certificate, visibility_arcs)
from .window import PointWindow, Provenance, dist_set_ray

__version__ = "0.1.0"

__all__ = [
    "ArcSet", "arc_union", "blocked_arc",
    "Point", "Direction", "Ray", "Segment",
    "dist_point_ray", "dist_point_segment", "dist_set_ray", "normalize_angle",
    "PointWindow", "Provenance",
    "SpiralParams", "spiral_points", "spiral_window",
    "PunctureParams", "PunctureResult", "lattice_enumeration",
    "puncture_construct", "generate_window", "verify_window",
    "verify_puncture_conditions",
    "VisibilityReport", "visibility_arcs", "Certificate",
    "t_blocked_certificate", "hidden_search", "SumAndBound",
    "inverse_norm_sum_and_bound",
    "ForestConstants", "forest_constants", "next_multiple", "BoundaryClass",
    "classify_boundary_point", "DJConstants", "dj_constants", "Subdivision",
    "dj_find_subdivision", "CensusResult", "frontal_census",
    "PlaneTree", "Realization", "BucketGrid", "EdgeMatch", "realize_edge",
    "ExceptionalReport", "exceptional_set", "realize_tree",
    "Scene", "load_scene", "save_scene", "scene_roundtrip", "canonical_json",
    "export_svg", "render_svg",
    "ObstructionLabError", "DomainError", "EmptySet", "DegenerateObstacle",
    "BadIndex", "BadParam", "BadDirection", "SearchOverflow",
    "MissingMetadata", "HorizonExceedsWindow", "NoAdmissibleRegion",
    "EpsilonTooLarge", "NotMultiple", "SubdivisionNotFound",
    "MissingSeparation", "RealizationFailed", "ParseError", "VersionError",
    "MissingTable",
]
