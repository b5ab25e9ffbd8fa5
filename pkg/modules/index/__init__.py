"""
modules.index package for RMTT-Workbench.
"""
