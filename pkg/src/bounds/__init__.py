"""Risk bound certificates"""
