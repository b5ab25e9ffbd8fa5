"""
modules.bench package for RMTT-Workbench.
"""
