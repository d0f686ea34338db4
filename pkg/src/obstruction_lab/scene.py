"""Scene files: serializable experiment inputs.

A scene is a window plus provenance and free-form annotations, stored as
JSON with shortest round-trip decimal floats (17 significant digits at
most), so load -> save -> load is byte-identical. Unknown fields are
preserved, both at the top level and inside the window object.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ParseError, VersionError
from .window import PointWindow, Provenance

FORMAT_VERSION = 1
SUPPORTED_VERSIONS = (1,)

_WINDOW_KEYS = ("points", "window_radius", "declared_separation",
                "declared_density_radius", "provenance")
_TOP_KEYS = ("format_version", "window", "annotations")


@dataclass
class Scene:
    window: PointWindow
    annotations: dict = field(default_factory=dict)
    format_version: int = FORMAT_VERSION
    extras: dict = field(default_factory=dict)          # unknown top-level keys
    window_extras: dict = field(default_factory=dict)   # unknown window keys


def canonical_json(obj) -> str:
    """The one serialization used for every JSON artifact (stable bytes)."""
    return json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def scene_to_dict(scene: Scene) -> dict:
    w = scene.window
    wd = {
        "points": [[float(x), float(y)] for x, y in w.points],
        "window_radius": w.window_radius,
        "declared_separation": w.declared_separation,
        "declared_density_radius": w.declared_density_radius,
        "provenance": w.provenance.to_dict(),
    }
    wd.update(scene.window_extras)
    d = {
        "format_version": scene.format_version,
        "window": wd,
        "annotations": dict(scene.annotations),
    }
    d.update(scene.extras)
    return d


def scene_from_dict(d: dict) -> Scene:
    if not isinstance(d, dict) or "format_version" not in d:
        raise ParseError("not a scene object: missing format_version")
    version = d["format_version"]
    if version not in SUPPORTED_VERSIONS:
        raise VersionError(
            "unsupported scene format_version %r (supported: %s)"
            % (version, ", ".join(str(v) for v in SUPPORTED_VERSIONS)))
    wd = d.get("window")
    if not isinstance(wd, dict):
        raise ParseError("scene has no window object")
    try:
        window = PointWindow(
            wd.get("points", []),
            wd["window_radius"],
            declared_separation=wd.get("declared_separation"),
            declared_density_radius=wd.get("declared_density_radius"),
            provenance=Provenance.from_dict(wd.get("provenance", {})),
        )
    except KeyError as exc:
        raise ParseError("window is missing field %s" % exc) from exc
    return Scene(
        window=window,
        annotations=dict(d.get("annotations", {})),
        format_version=int(version),
        extras={k: v for k, v in d.items() if k not in _TOP_KEYS},
        window_extras={k: v for k, v in wd.items() if k not in _WINDOW_KEYS},
    )


def save_scene(scene: Scene, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(scene_to_dict(scene)))


def load_scene(path) -> Scene:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("invalid JSON: %s" % exc.msg, line=exc.lineno,
                         column=exc.colno) from exc
    return scene_from_dict(data)


def scene_roundtrip(path) -> Scene:
    """Load a scene, proving it parses under a supported version."""
    return load_scene(path)
