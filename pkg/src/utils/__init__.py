"""Utility modules"""
