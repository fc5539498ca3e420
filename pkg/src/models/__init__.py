"""Parametric families, densities and divergences"""
