"""
tests package for RMTT-Workbench.
"""
