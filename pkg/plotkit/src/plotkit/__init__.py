"""Figure generation from shock-reflection CSV/JSON artifacts.

Consumes files only (cell/curve CSV pairs, field dumps, pattern reports);
never imports the package that produced them.
"""

__version__ = "0.1.0"
