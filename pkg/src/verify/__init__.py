"""Monte Carlo verification and lemma oracles"""
