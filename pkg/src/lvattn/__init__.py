"""Attention profiles of noisy Lotka-Volterra trajectories and their Lyapunov geometry."""
from .dynamics import State, SystemParams, Trajectory, equilibrium, simulate
from .kernels import BACKEND

__all__ = ["BACKEND", "State", "SystemParams", "Trajectory", "equilibrium", "simulate"]
__version__ = "0.1.0"
