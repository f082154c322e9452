from .config import PipelineConfig, load_config
from .stages import STAGES, StageError, run_all, run_stage
from .workspace import Workspace
from .server import serve_review, make_server

__all__ = [
    "PipelineConfig",
    "load_config",
    "STAGES",
    "StageError",
    "run_all",
    "run_stage",
    "Workspace",
    "serve_review",
    "make_server",
]
