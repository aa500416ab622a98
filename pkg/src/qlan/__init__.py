"""Local asymptotic normality for i.i.d. quantum states at desk scale."""

__version__ = "0.1.0"
