"""Which groups Z/m x Z/mk occur as point groups of elliptic curves over prime fields."""

__version__ = "0.1.0"
