"""Command-line experiment runner"""
