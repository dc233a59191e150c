"""Lorentzian model spaces PSL(2,R) and psl(2,R): contraction certificates,
timelike fibrations and strip deformations."""

__version__ = "0.1.0"
