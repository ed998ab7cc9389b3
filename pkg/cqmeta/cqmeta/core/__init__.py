from .experiments import ExperimentRunner

__all__ = ['ExperimentRunner']
