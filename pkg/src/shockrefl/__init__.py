"""Shock reflection analysis for self-similar potential flow.

Subpackages cover gas-state thermodynamics, Rankine-Hugoniot shock solving,
shock polars, local regular-reflection analysis, transition maps, and a
shock-capturing reference simulation, with a command line front end.
"""

__version__ = "0.1.0"
