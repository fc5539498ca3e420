"""Epsilon-grids and lattice summation bounds"""
