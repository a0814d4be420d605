# dilution_planner/__init__.py
"""Droplet dilution planning: EMDP, bit-serial baselines and an exact oracle."""

__version__ = "0.1.0"
