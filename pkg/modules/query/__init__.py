"""
modules.query package for RMTT-Workbench.
"""
