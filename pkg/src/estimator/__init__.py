"""Penalties and the penalized maximum-likelihood estimator"""
