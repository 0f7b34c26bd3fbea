from ._aefem import *  # noqa: F401,F403
from ._aefem import Error, PhysicsConfig, PmlProfile, Region, TetMesh

__all__ = [name for name in dir() if not name.startswith("_")]
