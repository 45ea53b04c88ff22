from .main import main, run
from .scene import Scene, parse_scene

__all__ = ["main", "run", "Scene", "parse_scene"]
