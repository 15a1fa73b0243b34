"""Continued fractions of hyperquadratic power series over F_p((1/T))."""
