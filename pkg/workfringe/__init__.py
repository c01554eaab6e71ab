from .config_maker import ConfigMaker
from .experiments import ExperimentRunner

__all__ = ["ConfigMaker", "ExperimentRunner"]

__version__ = "0.1.0"
