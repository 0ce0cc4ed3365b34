"""
Command-line front end for overflow experiments
"""
