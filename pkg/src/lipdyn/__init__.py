"""Stability and Lyapunov-exponent analysis for Lipschitz maps."""
