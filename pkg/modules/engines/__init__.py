"""
modules.engines package for RMTT-Workbench.
"""
